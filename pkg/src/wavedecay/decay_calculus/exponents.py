"""Exact exponent arithmetic for decay envelopes.

An exponent is an exact rational ``value`` together with a ``tilt``: the
coefficient of sigma in the expression that produced it.  The tilt never
changes a printed value.  It only breaks ties, by treating sigma as a number
infinitesimally smaller than the configured rational, so that ``5/2 + 5*sigma``
with sigma = 1/10 compares as strictly below 3 while a sigma-free ``1``
still equals 1 exactly.
"""
from __future__ import annotations

from fractions import Fraction
from functools import total_ordering
from math import gcd
from typing import Union

Q = Fraction
Number = Union[int, Fraction, str, "Exp"]
_ZERO = Fraction(0)
_INTS: dict = {}


def to_q(x: int | str | Fraction) -> Fraction:
    """Parse ``3``, ``"1/10"`` or a Fraction.  Floats are refused."""
    if isinstance(x, float):
        raise TypeError("exponents must be exact; got float %r" % x)
    return Fraction(x)


def _norm(vn: int, tn: int, d: int):
    g = gcd(gcd(vn, tn), d)
    if g > 1:
        return vn // g, tn // g, d // g
    return vn, tn, d


@total_ordering
class Exp:
    """Stored as integers ``(vn, tn, d)`` with value = vn/d and tilt = tn/d."""

    __slots__ = ("_vn", "_tn", "_d", "_h")

    def __init__(self, value: Fraction, tilt: Fraction = Fraction(0)):
        value, tilt = Fraction(value), Fraction(tilt)
        d = value.denominator * tilt.denominator // gcd(value.denominator, tilt.denominator)
        self._set(value.numerator * (d // value.denominator),
                  tilt.numerator * (d // tilt.denominator), d)

    def _set(self, vn, tn, d):
        vn, tn, d = _norm(vn, tn, d)
        object.__setattr__(self, "_vn", vn)
        object.__setattr__(self, "_tn", tn)
        object.__setattr__(self, "_d", d)
        object.__setattr__(self, "_h", None)

    @classmethod
    def _raw(cls, vn: int, tn: int, d: int) -> "Exp":
        e = object.__new__(cls)
        e._set(vn, tn, d)
        return e

    def __setattr__(self, name, value):
        raise AttributeError("Exp is immutable")

    def __reduce__(self):
        return (Exp, (self.value, self.tilt))

    @property
    def value(self) -> Fraction:
        return Fraction(self._vn, self._d)

    @property
    def tilt(self) -> Fraction:
        return Fraction(self._tn, self._d)

    @staticmethod
    def of(x: Number) -> "Exp":
        if type(x) is Exp:
            return x
        if type(x) is int:
            e = _INTS.get(x)
            if e is None:
                e = _INTS[x] = Exp._raw(x, 0, 1)
            return e
        return Exp(to_q(x), _ZERO)

    @staticmethod
    def sigma(sigma: Number, times: Number = 1) -> "Exp":
        """``times * sigma`` with its tilt recorded."""
        k = to_q(times)
        return Exp(k * to_q(sigma), k)

    def _cmp(self, other: Number) -> int:
        o = Exp.of(other)
        # real value is value - tilt*eps for an infinitesimal eps > 0
        x = self._vn * o._d - o._vn * self._d
        if x:
            return 1 if x > 0 else -1
        y = o._tn * self._d - self._tn * o._d
        return (y > 0) - (y < 0)

    def _key(self):
        return (self.value, -self.tilt)

    def __lt__(self, other: Number) -> bool:
        return self._cmp(other) < 0

    def __le__(self, other: Number) -> bool:
        return self._cmp(other) <= 0

    def __gt__(self, other: Number) -> bool:
        return self._cmp(other) > 0

    def __ge__(self, other: Number) -> bool:
        return self._cmp(other) >= 0

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction, str)):
            other = Exp.of(other)
        if not isinstance(other, Exp):
            return NotImplemented
        return self._vn == other._vn and self._tn == other._tn and self._d == other._d

    def __hash__(self) -> int:
        h = self._h
        if h is None:
            h = hash((self._vn, self._tn, self._d))
            object.__setattr__(self, "_h", h)
        return h

    def __add__(self, other: Number) -> "Exp":
        o = Exp.of(other)
        if o._d == self._d:
            if not o._vn and not o._tn:
                return self
            return Exp._raw(self._vn + o._vn, self._tn + o._tn, self._d)
        d = self._d * o._d
        return Exp._raw(self._vn * o._d + o._vn * self._d, self._tn * o._d + o._tn * self._d, d)

    __radd__ = __add__

    def __sub__(self, other: Number) -> "Exp":
        return self + (-Exp.of(other))

    def __rsub__(self, other: Number) -> "Exp":
        return Exp.of(other) - self

    def __neg__(self) -> "Exp":
        return Exp._raw(-self._vn, -self._tn, self._d)

    def __float__(self) -> float:
        return float(self.value)

    def same_value(self, other: Number) -> bool:
        return self.value == Exp.of(other).value

    def text(self) -> str:
        v = self.value
        return f"{v.numerator}/{v.denominator}"

    def __repr__(self) -> str:
        if self.tilt:
            return f"Exp({self.text()}, tilt={self.tilt})"
        return f"Exp({self.text()})"


def emin(*xs: Exp) -> Exp:
    return min(Exp.of(x) for x in xs)


def emax(*xs: Exp) -> Exp:
    return max(Exp.of(x) for x in xs)
