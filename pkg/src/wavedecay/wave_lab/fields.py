"""Vector fields Z in {d_t, d_r, S} applied to recorded trajectories, and Q(d phi, d phi)."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .config import Grid1D, InitialData, Nonlinearity, NullFormCoeffs, SimConfig
from .solver import Trajectory, null_form_values


class RadialSymmetry(ValueError):
    """Rotation fields vanish identically on radial functions."""


class DomainError(ValueError):
    pass


_ALIASES = {"t": "t", "dt": "t", "d_t": "t", "r": "r", "dr": "r", "d_r": "r",
            "S": "S", "s": "S", "scaling": "S"}
_ROTATIONS = {"Omega", "omega", "O", "rot"}


def normalize_word(word, max_len: int = 2) -> Tuple[str, ...]:
    if isinstance(word, str):
        word = tuple(x for x in word.replace(",", " ").split() if x)
    out = []
    for z in word:
        if z in _ROTATIONS or str(z).startswith("Omega"):
            raise RadialSymmetry("Omega annihilates radial fields; it is not a valid radial word")
        if z not in _ALIASES:
            raise ValueError(f"unknown vector field {z!r}; use t, r or S")
        out.append(_ALIASES[z])
    if len(out) > max_len:
        raise ValueError(f"words of length > {max_len} are beyond the differencing order")
    return tuple(out)


@dataclass
class FieldSlice:
    """Values of Z^word phi on times[ti] x r[ri]."""
    word: Tuple[str, ...]
    times: np.ndarray
    r: np.ndarray
    values: np.ndarray

    def at(self, t: float, r: float) -> float:
        i = int(np.argmin(np.abs(self.times - t)))
        j = int(np.argmin(np.abs(self.r - r)))
        if abs(self.times[i] - t) > 1e-9 * max(1.0, abs(t)) or abs(self.r[j] - r) > 1e-9 * max(1.0, r):
            raise DomainError(f"(t, r) = ({t}, {r}) is not a point of this slice")
        return float(self.values[i, j])


class _Field:
    """A field on the full (snapshot, grid) lattice with its validity window."""

    def __init__(self, vals, t0, t1, parity, dt_known=None):
        self.vals = vals          # full-shape array; only rows t0..t1-1 are trusted
        self.t0, self.t1 = t0, t1
        self.parity = parity
        self.dt_known = dt_known  # exact d_t of this field, when recorded


def _diff_r(v, dr, parity):
    g = np.concatenate([parity * v[:, 1:2], v, v[:, -1:]], axis=1)
    out = (g[:, 2:] - g[:, :-2]) / (2 * dr)
    out[:, -1] = np.nan   # one-sided at r_max: not trusted
    return out


def _ddr(f: _Field, dr: float) -> _Field:
    # d_r commutes with d_t, so a recorded d_t survives differentiation in r
    known = None if f.dt_known is None else _diff_r(f.dt_known, dr, f.parity)
    return _Field(_diff_r(f.vals, dr, f.parity), f.t0, f.t1, -f.parity, known)


def _ddt(f: _Field, times: np.ndarray, one_sided: bool = False) -> _Field:
    if f.dt_known is not None:
        return _Field(f.dt_known, f.t0, f.t1, f.parity)
    v = f.vals
    if one_sided:
        # second-order one-sided differences at the ends keep every snapshot
        if len(times) < 3:
            return _Field(np.full_like(v, np.nan), 0, 0, f.parity)
        return _Field(np.gradient(v, times, axis=0, edge_order=2), f.t0, f.t1, f.parity)
    out = np.full_like(v, np.nan)
    if len(times) >= 3:
        h = np.diff(times)
        out[1:-1] = (v[2:] - v[:-2]) / (h[1:] + h[:-1])[:, None]
    return _Field(out, f.t0 + 1, f.t1 - 1, f.parity)


def _scale(f: _Field, times, r, dr, one_sided: bool = False) -> _Field:
    ft = _ddt(f, times, one_sided)
    fr = _ddr(f, dr)
    out = times[:, None] * ft.vals + r[None, :] * fr.vals
    return _Field(out, max(ft.t0, fr.t0), min(ft.t1, fr.t1), f.parity)


def apply_vector_field(traj: Trajectory, word=()) -> FieldSlice:
    """Z^word phi by centred differences (S = t d_t + r d_r).

    The first d_t of phi uses the recorded d_t phi; further time derivatives
    difference across snapshots, so each costs one snapshot at either end.
    Each d_r costs the outermost grid point.
    """
    word = normalize_word(word)
    return lattice_values(traj, word)


def lattice_values(traj: Trajectory, word: Tuple[str, ...], one_sided: bool = False) -> FieldSlice:
    """Z^word phi for an already normalized word of any length.

    With ``one_sided`` the snapshot differences fall back to second-order
    one-sided stencils at the first and last snapshot, so no time is lost.
    """
    times, r, dr = traj.times, traj.r, traj.dr
    f = _Field(traj.phi, 0, len(times), traj.parity, dt_known=traj.dt_phi)
    for z in reversed(word):
        if z == "t":
            f = _ddt(f, times, one_sided)
        elif z == "r":
            f = _ddr(f, dr)
        else:
            f = _scale(f, times, r, dr, one_sided)
    n_r = len(r) - sum(1 for z in word if z in "rS")
    if f.t1 - f.t0 <= 0 or n_r <= 0:
        raise DomainError(f"word {word} leaves no valid points in this trajectory")
    vals = f.vals[f.t0:f.t1, :n_r]
    return FieldSlice(tuple(word), times[f.t0:f.t1], r[:n_r], vals)


def synthetic_trajectory(fn: Callable, times: Sequence[float], grid: Grid1D,
                         dt_fn: Optional[Callable] = None, mode_ell: int = 0) -> Trajectory:
    """Wrap a closed-form field f(t, r) as a Trajectory (linear, flat config)."""
    times = np.asarray(times, dtype=float)
    T, R = np.meshgrid(times, grid.r, indexing="ij")
    phi = np.asarray(fn(T, R), dtype=float) * np.ones_like(T)
    if dt_fn is None:
        h = 1e-6 * max(1.0, float(times.max()))
        dphi = (np.asarray(fn(T + h, R)) - np.asarray(fn(T - h, R))) / (2 * h) * np.ones_like(T)
    else:
        dphi = np.asarray(dt_fn(T, R), dtype=float) * np.ones_like(T)
    t_final = float(max(times.max(), 1e-9))
    data = InitialData(0.0, grid.dr)
    cfg = SimConfig(grid, t_final, data, nonlinearity=Nonlinearity.NONE, mode_ell=mode_ell)
    return Trajectory(cfg, times, phi, dphi)


def null_form_eval(dt_phi, dr_phi, angular_terms=0.0, coeffs: Optional[NullFormCoeffs] = None,
                   omega=(0.0, 0.0, 1.0)):
    """S^ab d_a phi d_b phi; the default coefficients give Q0 = -(d_t phi)^2 + |grad phi|^2.

    ``angular_terms`` is the tangential part of the spatial gradient (a 3-vector,
    orthogonal to ``omega``), zero for radial fields.
    """
    coeffs = coeffs if coeffs is not None else NullFormCoeffs()
    return null_form_values(coeffs.matrix, dt_phi, dr_phi, angular_terms, omega)
