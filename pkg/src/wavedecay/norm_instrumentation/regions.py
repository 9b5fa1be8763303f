"""Dyadic spacetime regions on the (snapshot, grid) lattice.

Time scales T are powers of two; radial and cone-distance scales R, U are
powers of four.  A base-4 scale X spans [X, 4X] (X = 1 spans [0, 4]).  Since
4^k only approximates 3T/8, the largest admissible scale is widened to reach
T, which closes the cover of C_T: a point of C_T outside every R-region and
every U-region would need r > T and t - r > T, impossible for t <= 2T.
Regions may instead be given an explicit ``span``; span 2 reproduces the
textbook sets R < r < 2R used by the Sobolev-type inequalities.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

_TOL = 1e-9


class EmptyRegion(ValueError):
    pass


class RegionKind(enum.Enum):
    CTR = "CTR"              # T <= t <= 2T, r <= t, r ~ R
    CTU = "CTU"              # T <= t <= 2T, r <= t, t - r ~ U
    CRT = "CRT"              # exterior r >= t, T <= t <= 2T, r ~ R, |r - t| ~ R, R > T
    CRR = "CRR"              # T <= t <= R, r ~ R, R/2 <= |r - t| <= 2R, R > T
    ANNULUS = "AnnulusAR"    # T <= t <= 2T, R <= <r> <= 2R
    INTERIOR = "InteriorBulk"  # T <= t <= 2T, r < 3T/4

    @classmethod
    def parse(cls, text: str) -> "RegionKind":
        for k in cls:
            if text in (k.value, k.name):
                return k
        raise ValueError(f"unknown region kind {text!r}")


def dyadic_T(t_max: float, t_min: float = 1.0) -> List[int]:
    """Powers of two T >= t_min with 2T <= t_max."""
    out, T = [], 1
    while 2 * T <= t_max + _TOL:
        if T >= t_min:
            out.append(T)
        T *= 2
    return out


def admissible_scales(T: float) -> List[int]:
    """Base-4 scales X = 1, 4, 16, ... with X <= 3T/8 (X = 1 always allowed)."""
    out, X = [1], 4
    while X <= 3 * T / 8 + _TOL:
        out.append(X)
        X *= 4
    return out


@dataclass(frozen=True)
class DyadicRegionSpec:
    kind: RegionKind
    T: float
    scale: Optional[float] = None     # R or U; unused for InteriorBulk
    span: Optional[float] = None      # extent factor; None = dyadic default

    def __post_init__(self):
        if isinstance(self.kind, str):
            object.__setattr__(self, "kind", RegionKind.parse(self.kind))
        k = self.kind
        if self.T < 1:
            raise ValueError("T must be >= 1")
        if k is RegionKind.INTERIOR:
            return
        if self.scale is None or self.scale < 1:
            raise ValueError(f"{k.value} needs a scale >= 1")
        if self.span is not None and self.span <= 1:
            raise ValueError("span must exceed 1")
        X = self.scale
        if k in (RegionKind.CTR, RegionKind.CTU) and X != 1 and X > 3 * self.T / 8 + _TOL:
            raise ValueError(f"{k.value} requires scale <= 3T/8 (got {X} for T = {self.T})")
        if k in (RegionKind.CRT, RegionKind.CRR) and not X > self.T:
            raise ValueError(f"{k.value} requires R > T (got R = {X}, T = {self.T})")

    @property
    def label(self) -> str:
        s = "" if self.scale is None else f"{self.scale:g}"
        return f"{self.kind.value}[T={self.T:g},{s}]"

    def time_window(self) -> Tuple[float, float]:
        T = self.T
        if self.kind is RegionKind.CRR:
            return T, self.scale
        return (0.0, 2.0) if T == 1 else (T, 2 * T)

    def extent(self) -> Tuple[float, float]:
        """[lo, hi] of the indexed variable (r, t - r or <r>)."""
        X = self.scale
        if self.kind in (RegionKind.CRT, RegionKind.CRR, RegionKind.ANNULUS):
            return X, (self.span or 2.0) * X
        if self.span is not None:
            hi = self.span * X if X > 1 else self.span
        else:
            hi = 4.0 * X
            if 4 * X > 3 * self.T / 8 + _TOL:
                hi = max(hi, float(self.T))
        return (0.0 if X == 1 else X), hi

    def mask(self, times, r) -> np.ndarray:
        t = np.asarray(times, dtype=float)[:, None]
        r = np.asarray(r, dtype=float)[None, :]
        t0, t1 = self.time_window()
        m = (t >= t0 - _TOL) & (t <= t1 + _TOL)
        k = self.kind
        if k is RegionKind.INTERIOR:
            return m & (r <= t + _TOL) & (r < 0.75 * self.T)
        lo, hi = self.extent()
        if k is RegionKind.CTR:
            return m & (r <= t + _TOL) & (r >= lo - _TOL) & (r <= hi + _TOL)
        if k is RegionKind.CTU:
            u = t - r
            return m & (u >= lo - _TOL) & (u <= hi + _TOL)
        if k is RegionKind.ANNULUS:
            jr = np.sqrt(1 + r * r)
            return m & (jr >= lo - _TOL) & (jr <= hi + _TOL)
        d = np.abs(r - t)
        inr = (r >= lo - _TOL) & (r <= hi + _TOL)
        if k is RegionKind.CRT:
            return m & (r >= t - _TOL) & inr & (d >= lo - _TOL) & (d <= hi + _TOL)
        return m & inr & (d >= lo / 2 - _TOL) & (d <= hi + _TOL)   # CRR


@dataclass(frozen=True)
class ConeRegion:
    """The whole of C_T: T <= t <= 2T (0 <= t <= 2 for T = 1), r <= t."""
    T: float

    @property
    def label(self) -> str:
        return f"C[T={self.T:g}]"

    def mask(self, times, r) -> np.ndarray:
        t = np.asarray(times, dtype=float)[:, None]
        rr = np.asarray(r, dtype=float)[None, :]
        t0, t1 = (0.0, 2.0) if self.T == 1 else (self.T, 2 * self.T)
        return (t >= t0 - _TOL) & (t <= t1 + _TOL) & (rr <= t + _TOL)


def cone_region(T: float) -> ConeRegion:
    return ConeRegion(T)


def cover(T: float) -> List[DyadicRegionSpec]:
    """CTR over admissible R plus CTU over admissible U; their union is C_T."""
    xs = admissible_scales(T)
    return ([DyadicRegionSpec(RegionKind.CTR, T, X) for X in xs]
            + [DyadicRegionSpec(RegionKind.CTU, T, X) for X in xs])
