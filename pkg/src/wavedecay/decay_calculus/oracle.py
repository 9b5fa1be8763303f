"""Numerical cross-check of the conversion rules.

For a radial source h(s, rho) the radial Duhamel formula gives

    r psi(t, r) = 1/2 * integral over D_tr of rho h(s, rho) ds drho,

with D_tr = {-(t+r) <= s - rho <= t - r, |t - r| <= s + rho <= t + r}.  The
oracle evaluates this integral for the envelope h = <rho>^-a <s+rho>^-b
<s-rho>^-c by midpoint quadrature in the null variables (alpha, beta) =
(s + rho, s - rho), on grids graded logarithmically away from beta = 0 and
alpha = 0 so that the <u> ~ 1 layer is resolved at modest resolution.
Time-derivative sources are handled by differentiating the band-restricted
integral in t exactly, as the flux through the moving edges of D_tr.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from .bounds import DecayBound, Region, SourceBound, SourceKind, Support


def _jb(x):
    return np.sqrt(1.0 + x * x)


def _graded_midpoints(lo: float, hi: float, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Midpoints and weights on [lo, hi] (lo >= 0) with x = exp(xi) - 1, xi uniform."""
    a, b = math.log1p(lo), math.log1p(hi)
    h = (b - a) / n
    xi = a + h * (np.arange(n) + 0.5)
    x = np.expm1(xi)
    return x, h * (1.0 + x)


def _signed_midpoints(lo: float, hi: float, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Graded midpoints on [lo, hi], split at 0 when the interval straddles it."""
    if lo >= 0:
        return _graded_midpoints(lo, hi, n)
    if hi <= 0:
        x, w = _graded_midpoints(-hi, -lo, n)
        return -x[::-1], w[::-1]
    n_neg = max(1, int(round(n * math.log1p(-lo) / (math.log1p(-lo) + math.log1p(hi)))))
    n_neg = min(n_neg, n - 1)
    xn, wn = _graded_midpoints(0.0, -lo, n_neg)
    xp, wp = _graded_midpoints(0.0, hi, n - n_neg)
    return np.concatenate([-xn[::-1], xp]), np.concatenate([wn[::-1], wp])


def _step(y):
    """Smooth step: 0 for y <= 0, 1 for y >= 1."""
    y = np.clip(y, 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        f0 = np.where(y > 0, np.exp(-1.0 / np.maximum(y, 1e-300)), 0.0)
        f1 = np.where(y < 1, np.exp(-1.0 / np.maximum(1.0 - y, 1e-300)), 0.0)
    return f0 / (f0 + f1)


def band_cutoff(s, rho):
    """Smooth cutoff equal to 1 on 3/4 <= rho/s <= 5/4, supported in [1/2, 3/2].

    A sharp indicator would break the <u>-weighted derivative bounds that the
    time-derivative estimate relies on, since it jumps where <u> ~ s.
    """
    x = rho / np.maximum(s, 1e-300)
    return _step((x - 0.5) * 4.0) * _step((1.5 - x) * 4.0)


def _support_mask(s, rho, support: Support):
    if support is Support.EVERYWHERE:
        return None
    band = np.where(s > 0, band_cutoff(s, rho), 0.0)
    return band if support is Support.CONE_BAND else 1.0 - band


def _density(a, b, c, support, alpha, beta):
    """rho h(s, rho) / 4: the Duhamel prefactor 1/2 times ds drho = dalpha dbeta / 2."""
    s = 0.5 * (alpha + beta)
    rho = 0.5 * (alpha - beta)
    f = 0.25 * rho * _jb(rho) ** (-a) * _jb(alpha) ** (-b) * _jb(beta) ** (-c)
    mask = _support_mask(s, rho, support)
    if mask is not None:
        f = f * mask
    return f


def _integral(a: float, b: float, c: float, support: Support, t: float, r: float,
              n: int) -> float:
    # D_tr = {|t-r| <= alpha <= t+r, -alpha <= beta <= t-r} in null variables
    alphas, wa = _graded_midpoints(abs(t - r), t + r, n)
    total = 0.0
    for al, w_al in zip(alphas, wa):
        lo, hi = -al, t - r
        if hi <= lo:
            continue
        beta, wb = _signed_midpoints(lo, hi, n)
        total += w_al * float(np.dot(_density(a, b, c, support, al, beta), wb))
    return total / r


def _line(a, b, c, support, n, alpha=None, beta=None, lo=0.0, hi=0.0) -> float:
    if hi <= lo:
        return 0.0
    x, w = _signed_midpoints(lo, hi, n)
    if alpha is None:
        f = _density(a, b, c, support, x, np.full_like(x, beta))
    else:
        f = _density(a, b, c, support, np.full_like(x, alpha), x)
    return float(np.dot(f, w))


def _time_derivative(a: float, b: float, c: float, support: Support, t: float, r: float,
                     n: int) -> float:
    """d/dt of the Duhamel integral, as the flux through the moving edges of D_tr."""
    u, v = t - r, t + r
    total = _line(a, b, c, support, n, alpha=v, lo=-v, hi=u)
    total += _line(a, b, c, support, n, beta=u, lo=abs(u), hi=v)
    if u > 0:
        total -= _line(a, b, c, support, n, alpha=u, lo=-u, hi=u)
    return total / r


def quadrature_oracle(src: SourceBound, t: float, r: float, resolution: int = 512) -> float:
    """Backward-cone integral of the envelope of ``src`` at (t, r), divided by r."""
    if t <= 0 or r <= 0:
        raise ValueError("t and r must be positive")
    if resolution < 64:
        raise ValueError("resolution must be at least 64")
    a, b, c = float(src.a), float(src.b), float(src.c)
    if src.kind is SourceKind.TIME_DERIVATIVE:
        return abs(_time_derivative(a, b, c, src.support, float(t), float(r), 16 * resolution))
    return _integral(a, b, c, src.support, float(t), float(r), resolution)


def envelope(bound: DecayBound, t: float, r: float) -> float:
    """Numeric value of <r>^-a <v>^-b <u>^-c nu^-p at (t, r)."""
    jr, jv, ju = math.hypot(1, r), math.hypot(1, t + r), math.hypot(1, t - r)
    nu = min(jr, ju)
    return (jr ** -float(bound.a) * jv ** -float(bound.b) * ju ** -float(bound.c)
            * nu ** -float(bound.nu_pow))


@dataclass(frozen=True)
class SlopeCheck:
    coordinate: str
    fitted: float
    symbolic: float

    @property
    def error(self) -> float:
        return abs(self.fitted - self.symbolic)

    def status(self, tol: float = 0.1) -> str:
        """``sharp`` within tol; ``dominated`` when the integral decays faster than
        the bound (the rule is valid but not sharp along this family); ``exceeds``
        when it decays slower."""
        if self.error <= tol:
            return "sharp"
        return "dominated" if self.fitted < self.symbolic else "exceeds"


def loglog_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    slope, _ = np.polyfit(np.log(np.asarray(xs, float)), np.log(np.asarray(ys, float)), 1)
    return float(slope)


def sample_points(region: Region, output: DecayBound, support: Support = Support.EVERYWHERE) -> Tuple[str, List[Tuple[float, float]], List[float]]:
    """(coordinate name, sample points, abscissae) adapted to the output's decay."""
    if region is Region.INTERIOR:
        v = 65536.0
        us = [64.0, 128.0, 256.0, 512.0]
        return "u", [((v + u) / 2, (v - u) / 2) for u in us], us
    can = output.canonical()
    if can.c.value == 0:
        ts = [200.0, 400.0, 800.0, 1600.0]
        if support is Support.CONE_BAND:
            # a band-supported source never reaches r = 2t; sample just outside
            # the cone, where the approach to the asymptotic rate is slow
            ts = [4.0 ** k for k in range(6, 10)]
            return "r", [(t, t + 2) for t in ts], [t + 2 for t in ts]
        return "r", [(t, 2 * t) for t in ts], [2 * t for t in ts]
    r = 65536.0
    us = [64.0, 128.0, 256.0, 512.0]
    return "u", [(r - u, r) for u in us], us


def check_application(src: SourceBound, output: DecayBound, region: Region,
                      resolution: int = 256) -> SlopeCheck:
    """Fit the oracle's decay along the sample family and compare with ``output``."""
    name, pts, xs = sample_points(region, output, src.support)
    oracle = [quadrature_oracle(src, t, r, resolution) for t, r in pts]
    # the symbolic side is fitted on the same points so <.> corrections cancel
    symbolic = [envelope(output, t, r) for t, r in pts]
    xs = [math.hypot(1, x) for x in xs]
    return SlopeCheck(name, loglog_slope(xs, oracle), loglog_slope(xs, symbolic))
