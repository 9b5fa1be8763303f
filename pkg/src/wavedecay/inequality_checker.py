"""Both sides of the dyadic Sobolev, Hardy, Klainerman-Sideris and Morawetz-type
inequalities, evaluated on trajectories and on closed-form fields.

Nothing here asserts an inequality.  Each check returns the two sides and their
ratio; a suite is judged by scale stability of the ratio (the constants are
measured, never assumed).  In radial symmetry the rotation fields vanish, so
the sums over Omega^j reduce to j = 0 and angular integrals to factors of 4 pi.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .norm_instrumentation import (DyadicRegionSpec, EmptyRegion, RegionKind, annulus_squares,
                                   hat_weights, jbracket, words_up_to)
from .norm_instrumentation.norms import FOUR_PI, le_from_squares, time_weights
from .wave_lab import (DomainError, Grid1D, Trajectory, lattice_values, operator_values,
                       synthetic_trajectory)
from .wave_lab.solver import null_form_values

KINDS = ("cone_hardy", "sobolev_U", "sobolev_R_in", "sobolev_R_out", "sobolev_RR",
         "klainerman_sideris", "morawetz_dyadic", "morawetz_interior")
MIN_CELLS = 32
TREND_LIMIT = 2.0


class ResolutionError(ValueError):
    """The subject is too coarse for the requested scale."""


@dataclass
class CheckReport:
    kind: str
    scales: Dict[str, float]
    lhs: float
    rhs: float
    notes: List[str] = field(default_factory=list)

    @property
    def ratio(self) -> float:
        if self.rhs > 0:
            return self.lhs / self.rhs
        return 0.0 if self.lhs == 0 else math.inf


@dataclass
class SuiteResult:
    kind: str
    reports: List[CheckReport]

    @property
    def ratios(self) -> List[float]:
        return [r.ratio for r in self.reports]

    @property
    def spread(self) -> float:
        rs = self.ratios
        if not rs or any(not (math.isfinite(x) and x > 0) for x in rs):
            return math.inf
        return max(rs) / min(rs)

    @property
    def passed(self) -> bool:
        return self.spread <= TREND_LIMIT


# --- lattice helpers --------------------------------------------------------------

def _field(traj: Trajectory, word) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    s = lattice_values(traj, tuple(word), one_sided=True)
    return s.times, s.r, s.values


def _trim(n_r, *arrays):
    return [a[:, :n_r] for a in arrays]


def _resolution(traj: Trajectory, space: float, time: Optional[float], what: str):
    if space / traj.dr < MIN_CELLS:
        raise ResolutionError(f"{what}: scale {space:g} spans {space / traj.dr:.1f} cells, "
                              f"need {MIN_CELLS}")
    if time is not None and len(traj.times) > 1:
        dt = float(np.max(np.diff(traj.times)))
        if time / dt < MIN_CELLS:
            raise ResolutionError(f"{what}: time scale {time:g} spans {time / dt:.1f} snapshots, "
                                  f"need {MIN_CELLS}")


def _region_l2(values, times, r, region_mask, t0, t1) -> float:
    """4 pi int int_region g^2 r^2 dr dt, square-rooted (mask applied nodewise)."""
    wt = time_weights(times, t0, min(t1, times[-1]))
    wr = hat_weights(r, 0.0, r[-1], weight=lambda s: s * s)
    g = np.where(region_mask, values * values, 0.0)
    return float(np.sqrt(FOUR_PI * wt @ g @ wr))


def _snapshot(traj: Trajectory, t: float) -> int:
    i = traj.snapshot_index(t)
    if abs(traj.times[i] - t) > 1e-9 * max(1.0, t):
        raise DomainError(f"t = {t} is not a recorded snapshot")
    return i


def _need_radius(traj: Trajectory, r_needed: float, what: str):
    if traj.r[-2] < r_needed:
        raise DomainError(f"{what}: grid ends at r = {traj.r[-1]:g}, needs {r_needed:g}")


# --- individual inequalities -------------------------------------------------------

def _cone_hardy(traj: Trajectory, t: float) -> CheckReport:
    _resolution(traj, t / 4, None, "cone_hardy")
    _need_radius(traj, 7 * t / 4, "cone_hardy")
    i = _snapshot(traj, t)
    r = traj.r[:-1]
    f = traj.phi[i, :-1]
    fr = lattice_values(traj, ("r",)).values[i]
    r2 = lambda s: s * s
    hardy_w = lambda s: (1 + (t - s) ** 2) ** -1 * s * s
    lhs = FOUR_PI * hat_weights(r, t / 2, 3 * t / 2, hardy_w) @ (f * f)
    grad = FOUR_PI * hat_weights(r, t / 4, 7 * t / 4, r2) @ (fr * fr)
    ends = FOUR_PI * (hat_weights(r, t / 4, t / 2, r2) + hat_weights(r, 3 * t / 2, 7 * t / 4, r2)) @ (f * f)
    return CheckReport("cone_hardy", {"t": t}, float(lhs), float(grad + ends / t ** 2))


# rhs coefficients of the four Sobolev-type bounds: (region kind, a, b, derivative)
def _sobolev_terms(kind: str, T: float, X: float):
    if kind == "sobolev_U":
        return RegionKind.CTU, (T ** 3 * X) ** -0.5, (X / T ** 3) ** 0.5, "r", (X, X)
    if kind == "sobolev_R_in":
        return RegionKind.CTR, (X ** 3 * T) ** -0.5, (X * T) ** -0.5, "r", (X, T)
    if kind == "sobolev_R_out":
        return RegionKind.CRT, (X ** 3 * T) ** -0.5, (X * T) ** -0.5, "t", (X, T)
    if kind == "sobolev_RR":
        return RegionKind.CRR, X ** -2.0, X ** -1.0, "t", (X, X)
    raise ValueError(kind)


def _sobolev(kind: str, traj: Trajectory, T: float, X: float) -> CheckReport:
    rk, a, b, d, (space, tscale) = _sobolev_terms(kind, T, X)
    region = DyadicRegionSpec(rk, T, X, span=2.0)
    _resolution(traj, space, tscale, kind)
    t0, t1 = region.time_window()
    if t1 > traj.times[-1] + 1e-9:
        raise DomainError(f"{kind}: region {region.label} extends past the recorded span")
    parts = {w: _field(traj, w) for w in [(), ("S",), (d,), (d, "S")]}
    n_r = min(p[1].shape[0] for p in parts.values()) - 1
    times, r = parts[()][0], parts[()][1][:n_r]
    m = region.mask(times, r)
    if not np.any(m):
        raise EmptyRegion(f"{region.label} contains no lattice points")
    w = parts[()][2][:, :n_r]
    lhs = float(np.max(np.abs(w[m])))
    rhs = 0.0
    for base in ((), ("S",)):
        rhs += a * _region_l2(parts[base][2][:, :n_r], times, r, m, t0, t1)
        rhs += b * _region_l2(parts[(d,) + base][2][:, :n_r], times, r, m, t0, t1)
    scales = {"T": T, ("U" if kind == "sobolev_U" else "R"): X}
    return CheckReport(kind, scales, lhs, rhs)


def _p_on_lattice(traj: Trajectory):
    """P phi from fourth-order stencils, aligned to the (snapshot, grid) lattice (NaN where unknown)."""
    out = np.full(traj.phi.shape, np.nan)
    if len(traj.times) >= 5:
        P, _, _, _ = operator_values(traj)
        out[2:-2, :P.shape[1]] = P
    return out


def _klainerman_sideris(traj: Trajectory, T: float, R: float, r_min: float = 8.0) -> CheckReport:
    """|d^2 phi| <= C [(1/<r> + 1/<u>)|d phi_{<=1}| + (1 + t/<u>)(<r>^-2 |phi_{<=2}| + |P phi|)].

    |d^2 phi| is the full spacetime Hessian of the radial field, whose angular
    block contributes 2 (phi_r / r)^2.  The Z-words run over {d_t, d_r, S} as
    radial stand-ins for {d, S}.  P phi comes from fourth-order stencils, so
    the run should be recorded with snapshot spacing equal to dr: otherwise
    grid-scale content that the scheme carries exactly shows up in P phi as a
    noise floor (a note is attached when the spacings differ).
    """
    region = DyadicRegionSpec(RegionKind.CTR, T, R, span=2.0)
    _resolution(traj, R, T, "klainerman_sideris")
    n_r = len(traj.r) - 4
    times, r = traj.times, traj.r[:n_r]
    get = lambda w: _field(traj, w)[2][:, :n_r]
    ftt, ftr, frr, fr = get(("t", "t")), get(("t", "r")), get(("r", "r")), get(("r",))
    with np.errstate(divide="ignore", invalid="ignore"):
        ang = np.where(r > 0, fr / r, 0.0)
    lhs = np.sqrt(ftt ** 2 + 2 * ftr ** 2 + frr ** 2 + 2 * ang ** 2)
    grad1 = np.zeros_like(lhs)
    for w in words_up_to(1):
        grad1 += np.hypot(get(("t",) + w), get(("r",) + w))
    low2 = sum(np.abs(get(w)) for w in words_up_to(2))
    P = np.abs(_p_on_lattice(traj)[:, :n_r])
    t = times[:, None]
    jr, ju = jbracket(r)[None, :], jbracket(t - r[None, :])
    rhs = (1 / jr + 1 / ju) * grad1 + (1 + t / ju) * (low2 / jr ** 2 + P)
    m = region.mask(times, r) & (r[None, :] >= r_min) & np.isfinite(rhs) & np.isfinite(lhs)
    if not np.any(m):
        raise EmptyRegion(f"{region.label} has no sampled points with r >= {r_min}")
    L, Rr = lhs[m], rhs[m]
    notes = [f"{m.sum()} samples"]
    ht = float(times[1] - times[0]) if len(times) > 1 else traj.dr
    if abs(ht - traj.dr) > 1e-9 * traj.dr:
        notes.append(f"snapshot spacing {ht:g} differs from dr = {traj.dr:g}")
    if np.all(L == 0):
        return CheckReport("klainerman_sideris", {"T": T, "R": R}, 0.0, float(np.max(Rr)), notes)
    with np.errstate(divide="ignore", invalid="ignore"):
        q = np.where(Rr > 0, L / Rr, np.inf)
    k = int(np.argmax(q))
    return CheckReport("klainerman_sideris", {"T": T, "R": R}, float(L[k]), float(Rr[k]),
                       notes + [f"uniform constant {q[k]:.4g}"])


_GROW = (7 / 8, 9 / 8)   # time window factors of the enlargement
_WIDEN = (1 / 2, 3)      # scale window factors (the span-2 set is [X, 2X])


def _enlarged_window(region: DyadicRegionSpec):
    T = region.T
    return _GROW[0] * T, _GROW[1] * 2 * T


def _enlarged_mask(region: DyadicRegionSpec, times, r):
    """A slight enlargement of a span-2 region: [X/2, 3X] in scale, [7T/8, 9T/4] in time."""
    t = np.asarray(times)[:, None]
    rr = np.asarray(r)[None, :]
    X = region.scale
    e0, e1 = _enlarged_window(region)
    tm = (t >= e0) & (t <= e1)
    lo, hi = (_WIDEN[0] * X if X > 1 else 0.0), _WIDEN[1] * max(X, 1.0)
    if region.kind is RegionKind.CTU:
        u = t - rr
        return tm & (u >= lo) & (u <= hi)
    return tm & (rr <= t) & (rr >= lo) & (rr <= hi)


def _morawetz_dyadic(traj: Trajectory, T: float, X: float, kind: RegionKind = RegionKind.CTR) -> CheckReport:
    """||d phi||_L2(C) <= C ( ||phi_{<=1} / nu||_L2(C~) + ||<r> P phi||_L2(C~) ), nu = min(<r>, <u>)."""
    region = DyadicRegionSpec(kind, T, X, span=2.0)
    _resolution(traj, X, T if kind is RegionKind.CTR else X, "morawetz_dyadic")
    n_r = len(traj.r) - 2
    times, r = traj.times, traj.r[:n_r]
    get = lambda w: _field(traj, w)[2][:, :n_r]
    t0, t1 = region.time_window()
    m = region.mask(times, r)
    mt = _enlarged_mask(region, times, r)
    if not np.any(m):
        raise EmptyRegion(region.label)
    lhs = _region_l2(np.hypot(get(("t",)), get(("r",))), times, r, m, t0, t1)
    nu = np.minimum(jbracket(r)[None, :], jbracket(times[:, None] - r[None, :]))
    low = sum(np.abs(get(w)) for w in words_up_to(1)) / nu
    P = np.nan_to_num(_p_on_lattice(traj)[:, :n_r]) * jbracket(r)[None, :]
    e0, e1 = _enlarged_window(region)
    e0, e1 = max(e0, times[0]), min(e1, times[-1])
    rhs = _region_l2(low, times, r, mt, e0, e1) + _region_l2(P, times, r, mt, e0, e1)
    return CheckReport("morawetz_dyadic", {"T": T, kind.value[-1]: X}, lhs, rhs)


def _le1_pieces(w, wt, wr, times, r, mask, t0, t1) -> float:
    pg, _ = annulus_squares(wt * wt + wr * wr, times, r, t0, t1, -0.5, mask)
    p0, _ = annulus_squares(w * w, times, r, t0, t1, -1.5, mask)
    return le_from_squares(pg, "sup") + le_from_squares(p0, "sup")


def _morawetz_interior(traj: Trajectory, T: float, n: int = 1) -> CheckReport:
    """||phi||_LE1(C_T^<3T/4) <= C ( T^-1 ||<r> phi_{<=n}||_LE1 + ||Q_{<=n}||_LE* ) on the same set."""
    region = DyadicRegionSpec(RegionKind.INTERIOR, T)
    _resolution(traj, 0.75 * T, T, "morawetz_interior")
    t0, t1 = region.time_window()
    if t1 > traj.times[-1] + 1e-9:
        raise DomainError(f"morawetz_interior: [{t0}, {t1}] extends past the run")
    n_r = len(traj.r) - 2
    times, r = traj.times, traj.r[:n_r]
    get = lambda w: _field(traj, w)[2][:, :n_r]
    m = region.mask(times, r)
    lhs = _le1_pieces(get(()), get(("t",)), get(("r",)), times, r, m, t0, t1)
    jr = jbracket(r)[None, :]
    weighted = 0.0
    for w in words_up_to(n):
        f, ft, fr = get(w), get(("t",) + w), get(("r",) + w)
        # d_r(<r> f) = <r> f_r + (r / <r>) f
        weighted += _le1_pieces(jr * f, jr * ft, jr * fr + (r / jr) * f, times, r, m, t0, t1)
    S = traj.config.null_coeffs.matrix
    Q = null_form_values(S, get(("t",)), get(("r",)))
    if traj.config.nonlinearity.value == "square_dt_phi":
        Q = get(("t",)) ** 2
    elif traj.config.nonlinearity.value == "none":
        Q = np.zeros_like(Q)
    qs = [Q]
    if n >= 1:
        Qt = np.gradient(Q, times, axis=0, edge_order=2)
        Qr = np.gradient(Q, r, axis=1, edge_order=2)
        qs += [Qt, Qr, times[:, None] * Qt + r[None, :] * Qr]
    qstar = 0.0
    for q in qs:
        p, _ = annulus_squares(q * q, times, r, t0, t1, 0.5, m)
        qstar += le_from_squares(p, "sum")
    return CheckReport("morawetz_interior", {"T": T}, lhs, weighted / T + qstar,
                       [f"vector-field order {n}"])


# --- public entry points ------------------------------------------------------------

def check_inequality(kind: str, subject: Trajectory, scales: Mapping[str, float]) -> CheckReport:
    """Evaluate both sides of one inequality at one choice of scales.

    ``scales`` keys by kind: cone_hardy {t}; sobolev_U {T, U}; sobolev_R_in,
    sobolev_R_out {T, R}; sobolev_RR {R} (optional T, default 1);
    klainerman_sideris {T, R}; morawetz_dyadic {T, R} or {T, U};
    morawetz_interior {T}.
    """
    s = dict(scales)
    if kind == "cone_hardy":
        return _cone_hardy(subject, float(s["t"]))
    if kind == "sobolev_U":
        return _sobolev(kind, subject, float(s["T"]), float(s["U"]))
    if kind in ("sobolev_R_in", "sobolev_R_out"):
        return _sobolev(kind, subject, float(s["T"]), float(s["R"]))
    if kind == "sobolev_RR":
        return _sobolev(kind, subject, float(s.get("T", 1.0)), float(s["R"]))
    if kind == "klainerman_sideris":
        return _klainerman_sideris(subject, float(s["T"]), float(s["R"]))
    if kind == "morawetz_dyadic":
        if "U" in s:
            return _morawetz_dyadic(subject, float(s["T"]), float(s["U"]), RegionKind.CTU)
        return _morawetz_dyadic(subject, float(s["T"]), float(s["R"]))
    if kind == "morawetz_interior":
        return _morawetz_interior(subject, float(s["T"]))
    raise ValueError(f"unknown inequality kind {kind!r}; choose from {', '.join(KINDS)}")


def run_suite(kind: str, subject: Trajectory, sweep: Sequence[Mapping[str, float]]) -> SuiteResult:
    return SuiteResult(kind, [check_inequality(kind, subject, sc) for sc in sweep])


# --- configured sweeps and closed-form subjects ---------------------------------------

DEFAULT_SWEEPS: Dict[str, List[Dict[str, float]]] = {
    "cone_hardy": [{"t": t} for t in (32, 64, 128)],
    "sobolev_U": [{"T": 64, "U": U} for U in (2, 4, 8)],
    "sobolev_R_in": [{"T": 64, "R": R} for R in (2, 4, 8, 16)],
    "sobolev_R_out": [{"T": 16, "R": R} for R in (32, 64, 128)],
    "sobolev_RR": [{"R": R} for R in (32, 64, 128)],
    "klainerman_sideris": [{"T": T, "R": T / 4} for T in (32, 64, 128)],
    "morawetz_dyadic": [{"T": T, "R": T / 4} for T in (32, 64, 128)],
    "morawetz_interior": [{"T": T} for T in (32, 64, 128)],
}

# kinds whose content does not depend on the PDE; checked on closed-form fields
SYNTHETIC_KINDS = ("cone_hardy", "sobolev_U", "sobolev_R_in", "sobolev_R_out", "sobolev_RR")


def profile_field(t, r):
    """The decay profile <t - r>^-1 <t + r>^-1."""
    return 1.0 / (jbracket(t - r) * jbracket(t + r))


def cone_bump(width: float = 4.0) -> Callable:
    """A smooth bump of the given half-width straddling the cone r = t."""
    def f(t, r):
        x = (r - t) / width
        inside = np.abs(x) < 1
        out = np.zeros(np.broadcast(t, r).shape)
        out[inside] = np.exp(1 - 1 / (1 - x[inside] ** 2))
        return out
    return f


def synthetic_subject(fn: Callable, t_max: float, r_max: float, h: float,
                      dt_fn: Optional[Callable] = None, times=None) -> Trajectory:
    """Sample ``fn`` on a lattice of spacing ``h`` in r and t (or on given ``times``)."""
    n = int(round(r_max / h))
    grid = Grid1D(n * h, n)
    if times is None:
        times = np.arange(int(round(t_max / h)) + 1) * h
    return synthetic_trajectory(fn, times, grid, dt_fn=dt_fn)


def default_subject(kind: str, fn: Callable = profile_field) -> Trajectory:
    """A closed-form subject resolving every scale of the kind's default sweep."""
    if kind == "cone_hardy":
        f = cone_bump() if fn is profile_field else fn
        return synthetic_subject(f, 0, 240.0, 0.125, times=[32.0, 64.0, 128.0])
    if kind == "sobolev_U":
        return synthetic_subject(fn, 130.0, 160.0, 1 / 16)
    if kind == "sobolev_R_in":
        return synthetic_subject(fn, 130.0, 140.0, 1 / 16)
    if kind == "sobolev_R_out":
        return synthetic_subject(fn, 34.0, 270.0, 0.5)
    if kind == "sobolev_RR":
        return synthetic_subject(fn, 130.0, 270.0, 0.5)
    raise ValueError(f"{kind} is checked on solver output, not on a closed-form field")
