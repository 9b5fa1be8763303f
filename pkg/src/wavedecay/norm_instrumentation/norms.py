"""Local-energy norms, region suprema and the energy functional on trajectories.

All spacetime integrals treat the squared integrand as piecewise linear in r
and t between lattice points and integrate the radial weights
<r>^(2p) r^2 exactly (Gauss-Legendre on each clipped cell).  Annulus edges and
time limits that fall between lattice points are therefore handled without
first-order loss, and constant fields are integrated to rounding.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..wave_lab import DomainError, Trajectory, apply_vector_field, lattice_values
from ..wave_lab.fields import normalize_word
from .regions import DyadicRegionSpec, EmptyRegion

FOUR_PI = 4.0 * np.pi
_GL_X, _GL_W = np.polynomial.legendre.leggauss(8)
_WORD_LETTERS = ("t", "r", "S")


class NormKind(enum.Enum):
    LE = "LE"
    LE1 = "LE1"
    LESTAR = "LEstar"
    REGION_SUP = "RegionSup"

    @classmethod
    def parse(cls, text) -> "NormKind":
        if isinstance(text, cls):
            return text
        for k in cls:
            if text in (k.value, k.name):
                return k
        raise ValueError(f"unknown norm kind {text!r}")


@dataclass
class NormReport:
    kind: NormKind
    value: float
    descriptor: Dict[str, object] = field(default_factory=dict)
    pieces: Optional[np.ndarray] = field(default=None, repr=False, compare=False)


def jbracket(x):
    return np.sqrt(1.0 + np.square(x))


# --- quadrature -------------------------------------------------------------

def hat_weights(nodes: np.ndarray, a: float, b: float,
                weight: Optional[Callable] = None) -> np.ndarray:
    """W with sum_j W_j g_j = int_a^b g(x) w(x) dx for g piecewise linear on ``nodes``."""
    x = np.asarray(nodes, dtype=float)
    W = np.zeros_like(x)
    if len(x) < 2 or b <= a:
        return W
    lo = np.clip(a, x[:-1], x[1:])
    hi = np.clip(b, x[:-1], x[1:])
    half = 0.5 * (hi - lo)
    live = half > 0
    if not np.any(live):
        return W
    idx = np.nonzero(live)[0]
    mid = 0.5 * (hi + lo)[idx]
    s = mid[:, None] + half[idx, None] * _GL_X
    w = np.ones_like(s) if weight is None else weight(s)
    h = (x[idx + 1] - x[idx])[:, None]
    theta = (s - x[idx, None]) / h
    gw = half[idx, None] * _GL_W * w
    np.add.at(W, idx, np.sum(gw * (1 - theta), axis=1))
    np.add.at(W, idx + 1, np.sum(gw * theta, axis=1))
    return W


def annuli(r_max: float) -> List[int]:
    """Dyadic R with A_R = {R <= <r> <= 2R} meeting [0, r_max]."""
    out, R = [], 1
    while np.sqrt(R * R - 1.0) < r_max:
        out.append(R)
        R *= 2
    return out


def _annulus_bounds(R: float) -> Tuple[float, float]:
    return np.sqrt(max(R * R - 1.0, 0.0)), np.sqrt(4.0 * R * R - 1.0)


def radial_weights(r: np.ndarray, power: float, R_list: Sequence[int]) -> np.ndarray:
    """(n_annuli, n_r) nodal weights of int_{A_R} g <r>^(2 power) r^2 dr."""
    w = lambda s: (1 + s * s) ** power * s * s
    return np.stack([hat_weights(r, *_annulus_bounds(R), weight=w) for R in R_list])


def time_weights(times: np.ndarray, t0: float, t1: float) -> np.ndarray:
    if len(times) == 1:
        return np.ones(1) if t0 == t1 == times[0] else np.zeros(1)
    return hat_weights(times, t0, t1)


def _check_span(times, t0, t1):
    tol = 1e-9 * max(1.0, abs(times[-1]))
    if t0 > t1 or t0 < times[0] - tol or t1 > times[-1] + tol:
        raise DomainError(f"[{t0}, {t1}] is not inside the recorded span "
                          f"[{times[0]}, {times[-1]}]")


def annulus_squares(values_sq: np.ndarray, times, r, t0, t1, power: float,
                    mask: Optional[np.ndarray] = None, R_list=None):
    """4 pi int_{t0}^{t1} int_{A_R} <r>^(2 power) g dx dt for each annulus R.

    ``values_sq`` is the nonnegative integrand g on the lattice (for example
    f^2); ``mask`` zeroes lattice points outside a spacetime region.
    """
    times = np.asarray(times, dtype=float)
    r = np.asarray(r, dtype=float)
    _check_span(times, t0, t1)
    R_list = annuli(r[-1]) if R_list is None else R_list
    g = values_sq if mask is None else np.where(mask, values_sq, 0.0)
    wt = time_weights(times, t0, t1)
    wr = radial_weights(r, power, R_list)
    return FOUR_PI * (wt @ g) @ wr.T, list(R_list)


def le_from_squares(pieces: np.ndarray, reduce: str) -> float:
    norms = np.sqrt(np.maximum(pieces, 0.0))
    if norms.size == 0:
        return 0.0
    return float(norms.max() if reduce == "sup" else norms.sum())


# --- word fields and gradients ------------------------------------------------

def _common(slices):
    n_r = min(s.values.shape[1] for s in slices)
    times = slices[0].times
    for s in slices:
        if not np.array_equal(s.times, times):
            raise DomainError("fields live on different snapshot windows")
    return times, slices[0].r[:n_r], [s.values[:, :n_r] for s in slices]


def word_with_gradient(traj: Trajectory, word=()):
    """(times, r, w, w_t, w_r) for w = Z^word phi on the full snapshot range."""
    word = tuple(word)
    parts = [lattice_values(traj, word, one_sided=True),
             lattice_values(traj, ("t",) + word, one_sided=True),
             lattice_values(traj, ("r",) + word, one_sided=True)]
    times, r, (w, wt, wr) = _common(parts)
    return times, r, w, wt, wr


def words_up_to(order: int) -> List[Tuple[str, ...]]:
    out = []
    for k in range(order + 1):
        out.extend(itertools.product(_WORD_LETTERS, repeat=k))
    return out


# --- public operations ----------------------------------------------------------

def weighted_dyadic_norm(traj: Trajectory, kind, t0: float, t1: float, word=(),
                         mask: Optional[np.ndarray] = None,
                         region: Optional[DyadicRegionSpec] = None) -> NormReport:
    """LE, LE1 or LEstar of Z^word phi over [t0, t1] x R^3.

    LE is the sup over annuli of ||<r>^(-1/2) f||, LEstar the sum over annuli
    of ||<r>^(1/2) f||.  LE1 adds ||d f||_LE (d = (d_t, d_r)) and
    ||<r>^(-1) f||_LE.  ``region`` or ``mask`` restrict the integrals to a
    spacetime subset.
    """
    kind = NormKind.parse(kind)
    word = normalize_word(word, max_len=3)
    times, r, w, wt, wr = word_with_gradient(traj, word)
    if region is not None:
        mask = region.mask(times, r)
    elif mask is not None:
        mask = mask[:, :len(r)]
    desc = {"t0": t0, "t1": t1, "word": "".join(word) or "phi"}
    if region is not None:
        desc["region"] = region.label
    if kind is NormKind.LE:
        p, R = annulus_squares(w * w, times, r, t0, t1, -0.5, mask)
        return NormReport(kind, le_from_squares(p, "sup"), desc, p)
    if kind is NormKind.LESTAR:
        p, R = annulus_squares(w * w, times, r, t0, t1, 0.5, mask)
        return NormReport(kind, le_from_squares(p, "sum"), desc, p)
    if kind is NormKind.LE1:
        pg, _ = annulus_squares(wt * wt + wr * wr, times, r, t0, t1, -0.5, mask)
        p0, _ = annulus_squares(w * w, times, r, t0, t1, -1.5, mask)
        value = le_from_squares(pg, "sup") + le_from_squares(p0, "sup")
        return NormReport(kind, value, desc, np.stack([pg, p0]))
    raise ValueError("RegionSup is computed by region_sup")


def lestar_of_values(values: np.ndarray, times, r, t0, t1, mask=None) -> float:
    p, _ = annulus_squares(values * values, times, r, t0, t1, 0.5, mask)
    return le_from_squares(p, "sum")


def region_sup(traj: Trajectory, region: DyadicRegionSpec, word=(),
               weight: Optional[Callable] = None) -> NormReport:
    """max |Z^word phi| (times ``weight(t, r)`` if given) over lattice points in the region."""
    word = normalize_word(word)
    s = apply_vector_field(traj, word)
    m = region.mask(s.times, s.r)
    if not np.any(m):
        raise EmptyRegion(f"{region.label} contains no lattice points of this trajectory")
    vals = np.abs(s.values)
    if weight is not None:
        vals = vals * weight(s.times[:, None], s.r[None, :])
    value = float(np.max(vals[m]))
    return NormReport(NormKind.REGION_SUP, value,
                      {"region": region.label, "word": "".join(word) or "phi"})


def energy_history(traj: Trajectory, order: int = 0) -> List[Tuple[float, float]]:
    """E_order(t) = sum_J ( sup_[0,t] ||d Z^J phi||_L2 + ||Z^J phi||_LE1[0,t] ), |J| <= order."""
    if not 0 <= int(order) <= 2:
        raise ValueError("order must be 0, 1 or 2")
    total = None
    for word in words_up_to(int(order)):
        times, r, w, wt, wr = word_with_gradient(traj, word)
        R_list = annuli(r[-1])
        grad2 = wt * wt + wr * wr
        # L2 norm of the gradient at each snapshot
        wfull = hat_weights(r, 0.0, r[-1], weight=lambda s: s * s)
        l2 = np.sqrt(FOUR_PI * grad2 @ wfull)
        run_max = np.maximum.accumulate(l2)
        le = np.zeros(len(times))
        for g, p in ((grad2, -0.5), (w * w, -1.5)):
            dens = FOUR_PI * g @ radial_weights(r, p, R_list).T        # (m, n_annuli)
            cum = np.zeros_like(dens)
            if len(times) > 1:
                h = np.diff(times)[:, None]
                cum[1:] = np.cumsum(0.5 * h * (dens[1:] + dens[:-1]), axis=0)
            le += np.sqrt(cum.max(axis=1))
        piece = run_max + le
        total = piece if total is None else total + piece
    return [(float(t), float(v)) for t, v in zip(times, total)]
