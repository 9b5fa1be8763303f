"""Power-law fits of dyadic suprema, and the standard decay-measurement pipeline."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..wave_lab import DomainError, Trajectory
from .norms import jbracket, region_sup
from .regions import DyadicRegionSpec, RegionKind, admissible_scales, cover, dyadic_T


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    residual: float     # rms of log residuals
    n: int

    def within(self, target: float, tol: float) -> bool:
        return abs(self.slope - target) <= tol


def fit_decay_exponents(samples: Sequence[Tuple[float, float]]) -> FitResult:
    """Least-squares line through (log scale, log value)."""
    samples = list(samples)
    if len(samples) < 3:
        raise DomainError(f"need at least 3 samples, got {len(samples)}")
    x = np.array([s for s, _ in samples], dtype=float)
    y = np.array([v for _, v in samples], dtype=float)
    if np.any(x <= 0) or np.any(~np.isfinite(y)) or np.any(y <= 0):
        raise DomainError("scales and values must be positive and finite")
    lx, ly = np.log(x), np.log(y)
    A = np.stack([lx, np.ones_like(lx)], axis=1)
    (slope, intercept), *_ = np.linalg.lstsq(A, ly, rcond=None)
    res = ly - (slope * lx + intercept)
    return FitResult(float(slope), float(intercept), float(np.sqrt(np.mean(res ** 2))), len(x))


def subtract_reference(traj: Trajectory, reference: Optional[Trajectory]) -> Trajectory:
    """Remove a same-lattice reference run, e.g. the flat linear run of the same data.

    In the continuum the flat linear solution vanishes inside the cone after
    the data has passed; on the lattice it leaves the dispersive wake of the
    scheme, which this subtraction removes from the interior measurement.
    """
    if reference is None:
        return traj
    if reference.phi.shape != traj.phi.shape or not np.array_equal(reference.times, traj.times) \
            or reference.dr != traj.dr:
        raise DomainError("reference trajectory lives on a different lattice")
    return Trajectory(traj.config, traj.times, traj.phi - reference.phi,
                       traj.dt_phi - reference.dt_phi)


@dataclass
class DecayMeasurement:
    u_samples: List[Tuple[float, float]]
    v_samples: List[Tuple[float, float]]
    u_fit: FitResult
    v_fit: FitResult
    T_u: int
    U_v: int
    notes: List[str] = field(default_factory=list)


def u_band_samples(traj: Trajectory, T: int, scales: Optional[Sequence[int]] = None):
    """(U, sup |phi| over C_T^U) for the admissible U > 1 at time scale T."""
    scales = scales or [U for U in admissible_scales(T) if U > 1]
    return [(float(U), region_sup(traj, DyadicRegionSpec(RegionKind.CTU, T, U)).value)
            for U in scales]


def v_band_samples(traj: Trajectory, Ts: Sequence[int], U: int = 1):
    """(T, sup |phi| over C_T^U) along a fixed-u band."""
    return [(float(T), region_sup(traj, DyadicRegionSpec(RegionKind.CTU, T, U)).value)
            for T in Ts]


def decay_samples(traj: Trajectory, reference: Optional[Trajectory] = None,
                  T_min: int = 16, U_v: int = 1, n_u: int = 3):
    """The (u_samples, v_samples, T_u, notes) that ``measure_decay`` fits.

    The u-band uses the ``n_u`` largest admissible U > 1 at the largest T with
    2T inside the run; the v-band uses every dyadic T >= T_min.  A reference
    run is subtracted for the u-band only: inside the cone the continuum free
    wave is zero, so the subtraction removes lattice error and nothing else,
    while on the cone band the free wave is the leading part of the solution.
    """
    work = subtract_reference(traj, reference)
    Ts = dyadic_T(traj.times[-1], T_min)
    if len(Ts) < 3:
        raise DomainError("run too short for three dyadic time scales")
    T_u = Ts[-1]
    Us = [U for U in admissible_scales(T_u) if U > 1][-n_u:]
    if len(Us) < 3:
        raise DomainError(f"T = {T_u} admits fewer than three cone distances")
    notes = [] if reference is None else ["reference run subtracted for the u-fit"]
    return u_band_samples(work, T_u, Us), v_band_samples(traj, Ts, U_v), T_u, notes


def measure_decay(traj: Trajectory, reference: Optional[Trajectory] = None,
                  T_min: int = 16, U_v: int = 1, n_u: int = 3) -> DecayMeasurement:
    """Fit the u-exponent on the last full C_T and the v-exponent on the U_v band."""
    us, vs, T_u, notes = decay_samples(traj, reference, T_min, U_v, n_u)
    return DecayMeasurement(us, vs, fit_decay_exponents(us), fit_decay_exponents(vs),
                            T_u, U_v, notes)


def envelope_constants(traj: Trajectory, Ts: Sequence[int], epsilon: float) -> Dict[str, List[Tuple[int, float]]]:
    """Per-T maxima of |phi| <v> <u>^(-1/2) / eps and |d_t phi| <r> mu^(1/2) / eps over C_T.

    mu = min(<t>, <u>)^(1/2), so the second weight is <r> min(<t>, <u>)^(1/4).
    """
    def w_phi(t, r):
        return jbracket(t + r) / np.sqrt(jbracket(t - r)) / epsilon

    def w_dphi(t, r):
        mu = np.sqrt(np.minimum(jbracket(t), jbracket(t - r)))
        return jbracket(r) * np.sqrt(mu) / epsilon

    out: Dict[str, List[Tuple[int, float]]] = {"phi": [], "dt_phi": []}
    for T in Ts:
        regions = cover(T)
        out["phi"].append((T, max(region_sup(traj, g, (), w_phi).value for g in regions)))
        out["dt_phi"].append((T, max(region_sup(traj, g, ("t",), w_dphi).value for g in regions)))
    return out
