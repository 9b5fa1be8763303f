"""Conversion rules: from source envelopes to solution envelopes."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Tuple

from .bounds import (BorderlineSum, BoundaryEta, BoundState, DecayBound, Region,
                     RuleDomain, SourceBound, SourceKind, Unsupported, join, stronger)
from .exponents import Exp, Number, to_q

HALF = Fraction(1, 2)


def default_lambda_grid(sigma: Fraction) -> Tuple[Fraction, ...]:
    base = {Fraction(k, 10) for k in range(1, 10)}
    base |= {sigma, 2 * sigma, 1 - sigma, HALF - sigma, HALF + sigma}
    return tuple(sorted(x for x in base if 0 < x < 1))


@dataclass(frozen=True)
class EngineConfig:
    sigma: Fraction
    max_steps: int = 0
    lambda_grid: Tuple[Fraction, ...] = ()
    # Use the cone time-derivative estimate in r > t+1 even when a + c < 3
    # (for c >= 0 only), as the exterior iteration does once phi ~ <r>^-1.
    # False restores the strict hypothesis.
    wide_exterior_dt: bool = True

    def __post_init__(self):
        s = to_q(self.sigma)
        object.__setattr__(self, "sigma", s)
        if not 0 < s < HALF:
            raise ValueError("sigma must lie in (0, 1/2)")
        if self.max_steps <= 0:
            object.__setattr__(self, "max_steps", 4 * _ceil(1 / s))
        grid = self.lambda_grid or default_lambda_grid(s)
        grid = tuple(sorted({to_q(x) for x in grid}))
        if not grid or not all(0 < x < 1 for x in grid):
            raise ValueError("lambda_grid must be a nonempty subset of (0, 1)")
        object.__setattr__(self, "lambda_grid", grid)

    @property
    def s(self) -> Exp:
        """sigma as a tilted exponent."""
        return Exp.sigma(self.sigma)


def _ceil(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def tilde_eta(eta: Number) -> Exp:
    eta = Exp.of(eta)
    if eta < Fraction(-1, 2):
        raise RuleDomain(f"eta = {eta.text()} < -1/2")
    if eta == 1:
        raise BoundaryEta("eta = 1 is excluded")
    if eta < 1:
        return eta - 2
    return Exp.of(-1)


def _check_alpha(a: Exp, lo=2) -> None:
    if not (a > lo and a < 3):
        raise RuleDomain(f"alpha = {a.text()} outside ({lo}, 3)")


def _check_common(src: SourceBound) -> None:
    _check_alpha(src.a)
    if src.b < 0:
        raise RuleDomain(f"beta = {src.b.text()} < 0")
    if src.c < Fraction(-1, 2):
        raise RuleDomain(f"eta = {src.c.text()} < -1/2")


def apply_interior_conversion(src: SourceBound) -> DecayBound:
    """<r>^-1 <u>^-(a+b+eta~-1) for r < t-1, no restriction on the sum."""
    _check_common(src)
    te = tilde_eta(src.c)
    return DecayBound(Region.INTERIOR, Exp.of(1), Exp.of(0), src.a + src.b + te - 1)


def apply_exterior_conversion(src: SourceBound, relaxed: bool = False) -> DecayBound:
    """Exterior bound: ``<r>^-1 <u>^-(a+b+eta~-1)`` above the sum 3, ``r^(2-sum)`` below.

    ``relaxed`` admits 1 < a <= 2 and eta = 1 in the below-3 branch; the
    exterior iteration needs this for the differentiated cone source during
    its first phase.  Only eta <= 1 is accepted there: for eta > 1 the
    backward-cone integral decays like r^(1-a), not r^(2-sum).
    """
    total = src.total()
    if total == 3:
        raise BorderlineSum("alpha + beta + eta = 3")
    if relaxed and total < 3:
        _check_alpha(src.a, lo=1)
        if src.b < 0 or src.c < Fraction(-1, 2):
            raise RuleDomain("beta < 0 or eta < -1/2")
        if src.c.value > 1:
            raise RuleDomain("relaxed branch needs eta <= 1")
        return DecayBound(Region.EXTERIOR, total - 2, Exp.of(0), Exp.of(0))
    _check_common(src)
    te = tilde_eta(src.c)
    if total > 3:
        return DecayBound(Region.EXTERIOR, Exp.of(1), Exp.of(0), src.a + src.b + te - 1)
    return DecayBound(Region.EXTERIOR, total - 2, Exp.of(0), Exp.of(0))


def apply_dt_conversion(src: SourceBound, region: Region = Region.INTERIOR,
                        strict: bool = True) -> DecayBound:
    """Solution of box psi = d_t g with g cone-supported: one <u> better than b = 0."""
    if src.kind is not SourceKind.TIME_DERIVATIVE or not src.cone_supported:
        raise RuleDomain("source must be a cone-supported time derivative")
    if src.b != 0:
        raise RuleDomain("time-derivative sources carry no <v> weight")
    _check_alpha(src.a)
    if src.c < Fraction(-1, 2):
        raise RuleDomain(f"eta = {src.c.text()} < -1/2")
    te = tilde_eta(src.c)
    if region is Region.EXTERIOR:
        s = src.a + src.c
        if s == 3:
            raise BorderlineSum("alpha + eta = 3")
        if s < 3 and (strict or src.c.value < 0):
            raise Unsupported("exterior with alpha + eta < 3")
    return DecayBound(region, Exp.of(1), Exp.of(0), src.a + te)


def derivative_gain(state: BoundState) -> DecayBound:
    if state.phi.nu_pow != 0:
        raise RuleDomain("phi must carry no nu weight")
    return state.phi.times(p=1)


def tangential_bound(state: BoundState) -> DecayBound:
    phi, dphi = state.phi, state.dphi
    via_r = join([dphi.times(a=1, c=-1), phi.times(a=1)])
    if phi.region is Region.EXTERIOR:
        return via_r
    # <t> ~ <v> away from r > t
    via_t = join([dphi.times(b=1, c=-1), phi.times(b=1)])
    return stronger(via_r, via_t)


def convert_r_to_t(phi: DecayBound, dphi: DecayBound, cfg: EngineConfig) -> DecayBound:
    """<r>^-1 <u>^-q  ->  <v>^-1 <u>^-q on the interior bulk."""
    if phi.region is not Region.INTERIOR:
        raise RuleDomain("conversion to t-decay is an interior statement")
    can = phi.canonical()
    if can.a != 1 or can.b != 0:
        raise RuleDomain(f"phi = {phi.text()} is not of the form <r>^-1 <u>^-q")
    q = can.c
    if q.value < -HALF:
        raise RuleDomain(f"q = {q.text()} < -1/2")
    if not q > Exp.sigma(cfg.sigma, 2) - 1:
        raise RuleDomain(f"q = {q.text()} <= -1 + 2 sigma")
    need = DecayBound(Region.INTERIOR, Exp.of(1), Exp.of(0), q + 1 - cfg.s)
    # a non-strict hypothesis: judged on values, so plain rationals are accepted
    if not all(x.value >= y.value for x, y in zip(dphi.profile(), need.profile())):
        raise RuleDomain(f"derivative bound {dphi.text()} weaker than {need.text()}")
    return DecayBound(Region.INTERIOR, Exp.of(0), Exp.of(1), q)
