"""Radial solver, free-wave oracle, vector fields and the trajectory container."""
from __future__ import annotations

import numpy as np
import pytest

from wavedecay.kvconfig import ConfigParseError
from wavedecay.wave_lab import (BlowupDetected, CoefficientProfile, ConfigError, DomainError,
                                Grid1D, InitialData, Nonlinearity, NullConditionViolated,
                                NullFormCoeffs, RadialSymmetry, SimConfig, Window,
                                apply_vector_field, evolve, free_wave_dt_exact,
                                free_wave_exact, load_trajectory, null_form_eval,
                                residual_norm, sample_null_covectors, save_trajectory,
                                synthetic_trajectory)

GAUSS = InitialData(0.05, 6.0, Window.GAUSSIAN)


def flat_linear(n, data=GAUSS, t_final=10.0, r_max=20.0, stride=4):
    return SimConfig(Grid1D(r_max, n), t_final, data, nonlinearity=Nonlinearity.NONE,
                     record_stride=stride)


@pytest.fixture(scope="module")
def refinement():
    return {n: evolve(flat_linear(n)) for n in (1024, 2048, 4096)}


# --- free_wave_exact ---------------------------------------------------------

def test_exact_origin_limit():
    data = InitialData(1.0, 8.0, Window.GAUSSIAN)
    for t in (0.0, 0.3, 1.0, 2.5):
        assert free_wave_exact(data, t, 0.0) == pytest.approx((1 - 2 * t * t) * np.exp(-t * t), abs=1e-12)
    # continuity of the r -> 0 limit
    assert free_wave_exact(data, 1.3, 1e-6) == pytest.approx(free_wave_exact(data, 1.3, 0.0), abs=1e-6)


def test_exact_identity_at_t0():
    data = InitialData(0.02, 3.0, Window.BUMP, p0=(1.0, -0.5))
    r = np.linspace(0.01, 5, 50)
    assert np.allclose(free_wave_exact(data, 0.0, r), data.phi0(r), atol=1e-15)


def test_exact_strong_huygens():
    data = InitialData(0.05, 2.0, Window.BUMP, p1=(1.0,))
    assert free_wave_exact(data, 10.0, 5.0) == 0.0


def test_exact_velocity_data():
    # phi0 = 0: phi_t(0, r) = phi1(r), and the solution solves the radial equation
    data = InitialData(0.05, 3.0, Window.BUMP, p0=(), p1=(1.0,))
    r = np.linspace(0.2, 2.5, 9)
    h = 1e-4
    dt = (free_wave_exact(data, h, r) - free_wave_exact(data, -h, r)) / (2 * h)
    assert np.allclose(dt, data.phi1(r), atol=1e-7)
    assert np.allclose(free_wave_dt_exact(data, 0.0, r), data.phi1(r), atol=1e-12)


# --- evolve --------------------------------------------------------------------

def test_second_order_convergence(refinement):
    errs = [np.max(np.abs(tr.phi[-1] - free_wave_exact(GAUSS, tr.times[-1], tr.r)))
            for tr in refinement.values()]
    for coarse, fine in zip(errs, errs[1:]):
        assert 3.5 <= coarse / fine <= 4.5


def test_residual_second_order(refinement):
    res = [residual_norm(tr, tr.config) for tr in refinement.values()]
    for coarse, fine in zip(res, res[1:]):
        assert 3.5 <= coarse / fine <= 4.5


def test_constant_field_has_zero_residual():
    g = Grid1D(30.0, 300)
    traj = synthetic_trajectory(lambda t, r: 0.3 + 0 * r, np.linspace(0, 2, 9), g,
                                dt_fn=lambda t, r: 0 * t)
    assert residual_norm(traj) < 1e-13


def test_huygens_and_finite_speed(refinement):
    tr = refinement[2048]
    R0, dr = GAUSS.support_radius, tr.dr
    t = tr.times[-1]
    phi = tr.phi[-1]
    outside = tr.r > t + R0 + 2 * dr
    assert np.max(np.abs(phi[outside])) < 1e-15
    inside = tr.r < t - R0
    assert np.max(np.abs(phi[inside])) < 50 * dr * dr * GAUSS.epsilon


def test_energy_conserved_flat_linear(refinement):
    for tr in refinement.values():
        e = [np.sum((tr.dt_phi[i] ** 2 + tr.dr_phi[i] ** 2) * tr.r ** 2) * tr.dr
             for i in range(len(tr.times))]
        assert np.ptp(e) / e[0] < 50 * tr.dr ** 2


def test_cfl_and_domain_validation():
    with pytest.raises(ConfigError):
        Grid1D(20.0, 100, cfl=0.7)
    Grid1D(20.0, 100, cfl=0.7, cfl_bound=1.0)
    with pytest.raises(ConfigError):
        SimConfig(Grid1D(20.0, 200, cfl=1.0, cfl_bound=1.0), 5.0,
                  coeffs=CoefficientProfile(amp_h=0.05))
    with pytest.raises(ConfigError):
        SimConfig(Grid1D(12.0, 200), 10.0)     # boundary not causally silent
    with pytest.raises(ConfigError):
        SimConfig(Grid1D(40.0, 400), 10.0, mode_ell=2)   # nonlinear mode run
    with pytest.raises(ConfigError):
        CoefficientProfile(amp_V=0.2)


def test_null_form_small_data_global():
    cfg = SimConfig(Grid1D(210.0, 1680), 200.0, InitialData(0.01, 4.0),
                    nonlinearity=Nonlinearity.NULL_FORM, record_stride=16)
    tr = evolve(cfg)
    assert tr.times[-1] == pytest.approx(200.0)
    assert np.max(np.abs(tr.phi)) < 2 * 0.01 * np.e ** 0


def test_john_contrast():
    data = InitialData(0.5, 4.0)
    grid = Grid1D(110.0, 1100)
    with pytest.raises(BlowupDetected) as info:
        evolve(SimConfig(grid, 100.0, data, nonlinearity=Nonlinearity.SQUARE_DT_PHI))
    assert 0 < info.value.time < 100
    tr = evolve(SimConfig(grid, 100.0, data, nonlinearity=Nonlinearity.NULL_FORM, record_stride=8))
    assert tr.times[-1] == pytest.approx(100.0)


def test_perturbed_run_leaks_little():
    a = 0.05
    cfg = SimConfig(Grid1D(60.0, 600), 40.0, InitialData(0.01, 4.0),
                    coeffs=CoefficientProfile(a, a, -a, a), nonlinearity=Nonlinearity.NULL_FORM,
                    record_stride=8)
    tr = evolve(cfg)
    outside = tr.r > tr.times[-1] + 4.0 + 2 * tr.dr
    assert np.max(np.abs(tr.phi[-1][outside])) < a * tr.dr * 0.01


def test_angular_mode_run():
    data = InitialData(0.01, 4.0, p0=(0.0, 1.0))
    cfg = SimConfig(Grid1D(40.0, 400), 20.0, data, nonlinearity=Nonlinearity.NONE,
                    mode_ell=1, coeffs=CoefficientProfile(amp_gw=0.05), record_stride=4)
    tr = evolve(cfg)
    assert np.all(tr.phi[:, 0] == 0)
    assert np.max(np.abs(tr.phi[-1])) < np.max(np.abs(tr.phi[0]))


# --- vector fields ---------------------------------------------------------------

def test_identity_word(refinement):
    tr = refinement[1024]
    s = apply_vector_field(tr, ())
    assert np.array_equal(s.values, tr.phi)


def test_scaling_of_t():
    g = Grid1D(30.0, 300)
    traj = synthetic_trajectory(lambda t, r: t + 0 * r, np.linspace(0, 10, 11), g,
                                dt_fn=lambda t, r: 1 + 0 * t)
    s = apply_vector_field(traj, ("S",))
    assert np.allclose(s.values, s.times[:, None], atol=1e-12)


def test_radial_identity_for_scaling():
    # d_r f = (S f)/r - (t/r) d_t f
    g = Grid1D(40.0, 800)
    f = lambda t, r: np.exp(-(r - t) ** 2 / 8) * np.cos(0.3 * r)
    traj = synthetic_trajectory(f, np.linspace(0, 10, 41), g)
    Sf = apply_vector_field(traj, ("S",))
    ft = apply_vector_field(traj, ("t",))
    fr = apply_vector_field(traj, ("r",))
    n = Sf.values.shape[1]
    rr = Sf.r[1:]
    lhs = fr.values[:, 1:n]
    rhs = Sf.values[:, 1:] / rr - (Sf.times[:, None] / rr) * ft.values[:, 1:n]
    assert np.max(np.abs(lhs - rhs)) < 1e-9


def test_second_time_derivative(refinement):
    errs = []
    for tr in refinement.values():
        s = apply_vector_field(tr, ("t", "t"))
        k = 1e-4
        ts, rr = s.times[:, None], s.r[None, 1:]
        exact = (free_wave_dt_exact(GAUSS, ts + k, rr) - free_wave_dt_exact(GAUSS, ts - k, rr)) / (2 * k)
        errs.append(np.max(np.abs(s.values[:, 1:] - exact)))
    for coarse, fine in zip(errs, errs[1:]):
        assert 3.5 <= coarse / fine <= 4.5


def test_vector_field_errors(refinement):
    tr = refinement[1024]
    with pytest.raises(RadialSymmetry):
        apply_vector_field(tr, ("Omega",))
    with pytest.raises(ValueError):
        apply_vector_field(tr, ("t", "t", "t"))
    short = synthetic_trajectory(lambda t, r: t * r, [0.0, 1.0], Grid1D(30.0, 300))
    with pytest.raises(DomainError):
        apply_vector_field(short, ("t", "t"))
    s = apply_vector_field(tr, ("r",))
    with pytest.raises(DomainError):
        s.at(0.0, tr.r[-1])


# --- null forms ------------------------------------------------------------------

def test_null_form_examples():
    assert null_form_eval(1.0, 1.0) == 0.0
    assert null_form_eval(2.0, 1.0) == -3.0
    assert null_form_eval(1.0, 0.0, angular_terms=np.array([1.0, 0.0, 0.0])) == 0.0


def test_null_form_rejects_mixed_term():
    S = np.zeros((4, 4))
    S[0, 3] = S[3, 0] = 0.5
    with pytest.raises(NullConditionViolated):
        NullFormCoeffs(tuple(map(tuple, S)))
    with pytest.raises(NullConditionViolated):
        NullFormCoeffs(tuple(map(tuple, np.diag([1.0, 1, 1, 1]))))


def test_null_covectors_annihilated():
    xi = sample_null_covectors(1000, seed=3)
    q = NullFormCoeffs.q0(2.5)
    vals = np.einsum("na,ab,nb->n", xi, q.matrix, xi)
    assert np.max(np.abs(vals)) < 1e-12


# --- persistence -------------------------------------------------------------------

def test_config_text_round_trip():
    cfg = SimConfig(Grid1D(40.0, 400), 20.0, InitialData(0.02, 3.0, p1=(1.0, 0.5)),
                    coeffs=CoefficientProfile(0.05, 0.01, -0.05, 0.0))
    back = SimConfig.from_text(cfg.to_text())
    assert back == cfg
    assert back.to_text() == cfg.to_text()


def test_config_parse_errors():
    with pytest.raises(ConfigParseError):
        SimConfig.from_text("n_cells = many\n")
    with pytest.raises(ConfigParseError):
        SimConfig.from_text("colour = blue\n")
    with pytest.raises(ConfigParseError):
        SimConfig.from_text("this line has no equals sign\n")


def test_trajectory_round_trip_and_bytes(tmp_path, refinement):
    tr = refinement[1024]
    a, b = tmp_path / "a.traj", tmp_path / "b.traj"
    save_trajectory(tr, a)
    save_trajectory(evolve(tr.config), b)
    assert a.read_bytes() == b.read_bytes()
    assert (tmp_path / "a.traj.idx").read_bytes() == (tmp_path / "b.traj.idx").read_bytes()
    back = load_trajectory(a)
    assert back.config == tr.config
    assert np.array_equal(back.phi, tr.phi) and np.array_equal(back.times, tr.times)


def test_trajectory_rejects_garbage(tmp_path):
    p = tmp_path / "junk.traj"
    p.write_bytes(b"not a trajectory\n")
    with pytest.raises(ValueError):
        load_trajectory(p)
