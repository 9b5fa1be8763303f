"""Pointwise decay envelopes and the order between them.

A bound ``<r>^-a <v>^-b <u>^-c nu^-p`` (nu = min(<r>, <u>)) is compared through
a small set of linear functionals of its exponents, one per extreme ray of
the (log <r>, log <u>) cone that the region occupies:

* exterior (r > t+1) and the cone band: <u> <= <r> ~ <v>, nu ~ <u>.
  Functionals ``(a+b, a+b+c+p)``.
* interior (r < t-1): <v> ~ max(<r>, <u>), nu = min(<r>, <u>).
  Functionals ``(a+b, b+c, a+b+c+p)``.

``S implies T`` (S <~ T everywhere in the region) iff every functional of S
is >= the matching functional of T.  Monomials are a lattice under this order,
so joins are exact.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence, Tuple

from .exponents import Exp, Number


class DecayError(Exception):
    """Base class for rule-engine failures."""


class BoundaryEta(DecayError):
    pass


class BorderlineSum(DecayError):
    pass


class RuleDomain(DecayError):
    pass


class Unsupported(DecayError):
    pass


class NoAdmissibleSplit(DecayError):
    pass


class StepCapExceeded(DecayError):
    pass


class Region(enum.Enum):
    EXTERIOR = "exterior"
    INTERIOR = "interior"
    CONE_BAND = "cone"


class SourceKind(enum.Enum):
    PLAIN = "plain"
    TIME_DERIVATIVE = "dt"
    NULL_FORM = "null"


class Support(enum.Enum):
    EVERYWHERE = "all"
    OFF_CONE = "offcone"
    CONE_BAND = "cone"


# None stands for +infinity: the source vanishes on that ray.
Profile = Tuple[Optional[Exp], ...]


def _e(x: Number) -> Exp:
    return Exp.of(x)


def functionals(region: Region, a: Exp, b: Exp, c: Exp, p: Exp = Exp.of(0)) -> Profile:
    if region is Region.INTERIOR:
        return (a + b, b + c, a + b + c + p)
    return (a + b, a + b + c + p)


def restrict(region: Region, prof: Profile, support: Support) -> Profile:
    """Drop the rays a support never reaches."""
    if support is Support.EVERYWHERE:
        return prof
    if region is Region.INTERIOR:
        if support is Support.OFF_CONE:  # r <= t/2: <u> ~ <v> >= <r>
            return (None, prof[1], prof[2])
        return (prof[0], None, prof[2])  # band: <u> <= <r>
    if support is Support.OFF_CONE:  # r >= 3t/2: <u> ~ <r>
        return (None, prof[1])
    return prof


def profile_implies(s: Profile, t: Profile) -> bool:
    return all(si is None or (ti is not None and si >= ti) for si, ti in zip(s, t))


def profile_join(*profs: Profile) -> Profile:
    out = []
    for vals in zip(*profs):
        finite = [v for v in vals if v is not None]
        out.append(min(finite) if finite else None)
    return tuple(out)


def from_profile(region: Region, prof: Profile) -> Tuple[Exp, Exp, Exp]:
    """A representative (a, b, c) with nu_pow = 0."""
    zero = Exp.of(0)
    if region is Region.INTERIOR:
        fa, fb, ft = prof
        if fa is None and fb is None:
            return ft, zero, zero
        if fa is None:
            return ft - fb, fb, zero
        if fb is None:
            return fa, zero, ft - fa
        return ft - fb, fa + fb - ft, ft - fa
    fx, ft = prof
    if fx is None:
        return ft, zero, zero
    return fx, zero, ft - fx


@dataclass(frozen=True)
class DecayBound:
    """|field| <~ <r>^-a <v>^-b <u>^-c nu^-nu_pow in ``region``."""

    region: Region
    a: Exp
    b: Exp
    c: Exp
    nu_pow: Exp = field(default=Exp.of(0))

    def __post_init__(self):
        for name in ("a", "b", "c", "nu_pow"):
            object.__setattr__(self, name, _e(getattr(self, name)))
        if self.nu_pow < 0:
            raise ValueError("nu_pow must be >= 0")

    @classmethod
    def make(cls, region: Region, a=0, b=0, c=0, p=0) -> "DecayBound":
        return cls(region, _e(a), _e(b), _e(c), _e(p))

    def profile(self) -> Profile:
        return functionals(self.region, self.a, self.b, self.c, self.nu_pow)

    def canonical(self) -> "DecayBound":
        a, b, c = from_profile(self.region, self.profile())
        return DecayBound(self.region, a, b, c, Exp.of(0))

    def implies(self, other: "DecayBound") -> bool:
        """True when self is at least as strong as ``other``."""
        _same_region(self, other)
        return profile_implies(self.profile(), other.profile())

    def equivalent(self, other: "DecayBound") -> bool:
        return self.implies(other) and other.implies(self)

    def same_values(self, other: "DecayBound") -> bool:
        """Equivalence judged on printed values only, ignoring tilts."""
        _same_region(self, other)
        return all(x.value == y.value for x, y in zip(self.profile(), other.profile()))

    def times(self, a=0, b=0, c=0, p=0) -> "DecayBound":
        """Multiply by <r>^-a <v>^-b <u>^-c nu^-p."""
        return replace(self, a=self.a + _e(a), b=self.b + _e(b), c=self.c + _e(c),
                       nu_pow=self.nu_pow + _e(p))

    def __mul__(self, other: "DecayBound") -> "DecayBound":
        _same_region(self, other)
        return self.times(other.a, other.b, other.c, other.nu_pow)

    def exps(self) -> Tuple[Exp, Exp, Exp, Exp]:
        return (self.a, self.b, self.c, self.nu_pow)

    def text(self) -> str:
        return "(" + ",".join(x.text() for x in self.exps()) + ")"

    def __str__(self) -> str:
        return f"{self.region.value}{self.text()}"


def _same_region(x: DecayBound, y: DecayBound) -> None:
    if x.region is not y.region:
        raise ValueError(f"region mismatch: {x.region} vs {y.region}")


def join(bounds: Sequence[DecayBound]) -> DecayBound:
    """Least monomial bound dominating every input."""
    region = bounds[0].region
    for b in bounds[1:]:
        _same_region(bounds[0], b)
    a, b_, c = from_profile(region, profile_join(*(b.profile() for b in bounds)))
    return DecayBound(region, a, b_, c)


def stronger(x: DecayBound, y: DecayBound) -> DecayBound:
    """Either bound is valid; keep the stronger one (larger profile sum on ties)."""
    if x.implies(y):
        return x
    if y.implies(x):
        return y
    sx = sum(x.profile(), Exp.of(0))
    sy = sum(y.profile(), Exp.of(0))
    return x if sx >= sy else y


@dataclass(frozen=True)
class SourceBound:
    """Envelope h(t, r) <~ <r>^-a <v>^-b <u>^-c of a wave-equation source."""

    a: Exp
    b: Exp
    c: Exp
    kind: SourceKind = SourceKind.PLAIN
    support: Support = Support.EVERYWHERE

    def __post_init__(self):
        for name in ("a", "b", "c"):
            object.__setattr__(self, name, _e(getattr(self, name)))
        if self.kind is SourceKind.TIME_DERIVATIVE and self.support is not Support.CONE_BAND:
            raise ValueError("time-derivative sources must be supported in the cone band")

    @classmethod
    def make(cls, a, b, c, kind: SourceKind = SourceKind.PLAIN,
             support: Support | None = None) -> "SourceBound":
        if support is None:
            support = Support.CONE_BAND if kind is SourceKind.TIME_DERIVATIVE else Support.EVERYWHERE
        return cls(_e(a), _e(b), _e(c), kind, support)

    @property
    def cone_supported(self) -> bool:
        return self.support is Support.CONE_BAND

    def total(self) -> Exp:
        return self.a + self.b + self.c

    def profile(self, region: Region) -> Profile:
        return restrict(region, functionals(region, self.a, self.b, self.c), self.support)

    def text(self) -> str:
        return "(" + ",".join(x.text() for x in (self.a, self.b, self.c)) + ")"


@dataclass(frozen=True)
class BoundState:
    phi: DecayBound
    dphi: DecayBound
    dbar_phi: DecayBound
    step_index: int = 0

    def __post_init__(self):
        if not (self.phi.region is self.dphi.region is self.dbar_phi.region):
            raise ValueError("all bounds of a state must share one region")

    @property
    def region(self) -> Region:
        return self.phi.region

    def canonical(self) -> "BoundState":
        return BoundState(self.phi.canonical(), self.dphi.canonical(),
                          self.dbar_phi.canonical(), self.step_index)

    def same_values(self, other: "BoundState") -> bool:
        return (self.phi.same_values(other.phi) and self.dphi.same_values(other.dphi)
                and self.dbar_phi.same_values(other.dbar_phi))

    def line(self) -> str:
        return (f"step={self.step_index} region={self.region.value} phi={self.phi.text()} "
                f"dphi={self.dphi.text()} dbar={self.dbar_phi.text()}")
