"""Simulation inputs: grid, coefficients, null-form coefficients, data."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, Mapping, Optional, Tuple

import numpy as np

from .. import kvconfig as kv

CFL_BOUND = 0.5
MINKOWSKI = np.diag([-1.0, 1.0, 1.0, 1.0])


class ConfigError(ValueError):
    """Invalid simulation configuration (CFL, domain size, amplitudes, ...)."""


class NullConditionViolated(ValueError):
    pass


class Nonlinearity(enum.Enum):
    NULL_FORM = "null_form"
    SQUARE_DT_PHI = "square_dt_phi"
    NONE = "none"


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid r_i = i dr on [0, r_max] with dt = cfl * dr.

    ``cfl_bound`` defaults to 1/2.  It may be raised up to the stability limit
    of the scheme (checked against the local wave speed in SimConfig); at
    dt = dr the flat 1+1 leapfrog update is exact, which removes the numerical
    dispersion wake from interior tail measurements.
    """
    r_max: float
    n_cells: int
    cfl: float = CFL_BOUND
    cfl_bound: float = CFL_BOUND

    def __post_init__(self):
        if self.n_cells < 8 or self.r_max <= 0:
            raise ConfigError("grid needs n_cells >= 8 and r_max > 0")
        if not 0 < self.cfl_bound <= 1:
            raise ConfigError("cfl_bound must lie in (0, 1]")
        if not 0 < self.cfl <= self.cfl_bound:
            raise ConfigError(f"dt/dr = {self.cfl} violates the CFL bound {self.cfl_bound}")

    @property
    def dr(self) -> float:
        return self.r_max / self.n_cells

    @property
    def dt(self) -> float:
        return self.cfl * self.dr

    @property
    def r(self) -> np.ndarray:
        return np.arange(self.n_cells + 1) * self.dr


def _jr_pow(r, k):
    return (1.0 + r * r) ** (-0.5 * k)


@dataclass(frozen=True)
class CoefficientProfile:
    """Time-independent radial perturbations amp * <r>^-k.

    h sits in the g^rr slot and B^0, B^r share amp_B, both with k = 1 + sigma;
    V and g^omega use k = 2 + sigma.
    """
    amp_h: float = 0.0
    amp_B: float = 0.0
    amp_V: float = 0.0
    amp_gw: float = 0.0
    sigma: Fraction = Fraction(1, 10)

    def __post_init__(self):
        for name in ("amp_h", "amp_B", "amp_V", "amp_gw"):
            if abs(getattr(self, name)) > 0.1:
                raise ConfigError(f"|{name}| must be <= 0.1")
        s = Fraction(self.sigma)
        if s <= 0:
            raise ConfigError("sigma must be positive")
        object.__setattr__(self, "sigma", s)

    @property
    def flat(self) -> bool:
        return not any((self.amp_h, self.amp_B, self.amp_V, self.amp_gw))

    def arrays(self, r: np.ndarray) -> Dict[str, np.ndarray]:
        s = float(self.sigma)
        slow, fast = _jr_pow(r, 1 + s), _jr_pow(r, 2 + s)
        return {"h": self.amp_h * slow, "B0": self.amp_B * slow, "Br": self.amp_B * slow,
                "V": self.amp_V * fast, "gw": self.amp_gw * fast}


def sample_null_covectors(n: int = 1000, seed: int = 0) -> np.ndarray:
    """Covectors (xi_0, xi_vec) with |xi_vec| = |xi_0|, both time orientations."""
    rng = np.random.default_rng(seed)
    d = rng.normal(size=(n, 3))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    xi0 = rng.uniform(0.2, 3.0, size=n) * rng.choice([-1.0, 1.0], size=n)
    return np.column_stack([xi0, np.abs(xi0)[:, None] * d])


@dataclass(frozen=True)
class NullFormCoeffs:
    S: Tuple[Tuple[float, ...], ...] = tuple(map(tuple, MINKOWSKI))

    def __post_init__(self):
        S = np.asarray(self.S, dtype=float)
        if S.shape != (4, 4):
            raise ConfigError("S must be 4x4")
        object.__setattr__(self, "S", tuple(map(tuple, S)))
        if not np.allclose(S, S.T, atol=1e-14):
            raise NullConditionViolated("S must be symmetric")
        xi = np.vstack([sample_null_covectors(256), np.array(
            [[1, 1, 0, 0], [1, -1, 0, 0], [1, 0, 1, 0], [1, 0, 0, -1]], float)])
        vals = np.einsum("na,ab,nb->n", xi, S, xi)
        scale = max(1.0, float(np.abs(S).max()))
        if np.abs(vals).max() > 1e-12 * scale:
            raise NullConditionViolated(
                f"S^ab xi_a xi_b = {vals[np.argmax(np.abs(vals))]:.3g} on a null covector")
        # a quadratic form vanishing on the null cone is a multiple of the metric
        lam = S[1, 1]
        if not np.allclose(S, lam * MINKOWSKI, atol=1e-12 * scale):
            raise NullConditionViolated("S is not a multiple of the Minkowski form")

    @classmethod
    def q0(cls, scale: float = 1.0) -> "NullFormCoeffs":
        return cls(tuple(map(tuple, scale * MINKOWSKI)))

    @property
    def matrix(self) -> np.ndarray:
        return np.asarray(self.S)

    @property
    def scale(self) -> float:
        return self.S[1][1]


class Window(enum.Enum):
    BUMP = "bump"
    GAUSSIAN = "gaussian"


@dataclass(frozen=True)
class InitialData:
    """phi0 = eps * p0(r) * w(r), phi1 = eps * p1(r) * w(r) for r < support_radius.

    ``bump`` is exp(1 - 1/(1 - (r/R)^2)), smooth and compactly supported;
    ``gaussian`` is exp(-r^2) cut off at R (the jump is exp(-R^2)).
    """
    epsilon: float = 0.01
    support_radius: float = 4.0
    window: Window = Window.BUMP
    p0: Tuple[float, ...] = (1.0,)
    p1: Tuple[float, ...] = ()

    def __post_init__(self):
        if not 0 <= self.epsilon <= 1:
            raise ConfigError("epsilon must lie in [0, 1]")
        if self.support_radius <= 0:
            raise ConfigError("support_radius must be positive")
        object.__setattr__(self, "window", Window(self.window))
        object.__setattr__(self, "p0", tuple(float(x) for x in self.p0))
        object.__setattr__(self, "p1", tuple(float(x) for x in self.p1))

    @property
    def small(self) -> bool:
        """Inside the small-data regime the decay statements are about."""
        return self.epsilon <= 0.05

    def _window(self, r, deriv=False):
        r = np.abs(np.asarray(r, dtype=float))
        R = self.support_radius
        inside = r < R
        if self.window is Window.GAUSSIAN:
            w = np.where(inside, np.exp(-r * r), 0.0)
            return (w, -2 * r * w) if deriv else w
        x = np.where(inside, r / R, 0.0)
        den = np.where(inside, 1 - x * x, 1.0)
        w = np.where(inside, np.exp(1 - 1 / den), 0.0)
        if deriv:
            return w, w * (-2 * x / den ** 2) / R
        return w

    def _profile(self, coeffs, r, deriv=False):
        p = np.polynomial.Polynomial(coeffs or (0.0,))
        r = np.asarray(r, dtype=float)
        ar = np.abs(r)
        if deriv:
            w, dw = self._window(ar, True)
            return self.epsilon * p(ar) * w, self.epsilon * (p.deriv()(ar) * w + p(ar) * dw)
        return self.epsilon * p(ar) * self._window(ar)

    def phi0(self, r, deriv=False):
        return self._profile(self.p0, r, deriv)

    def phi1(self, r, deriv=False):
        return self._profile(self.p1, r, deriv)


@dataclass(frozen=True)
class SimConfig:
    grid: Grid1D
    t_final: float
    data: InitialData = field(default_factory=InitialData)
    coeffs: CoefficientProfile = field(default_factory=CoefficientProfile)
    null_coeffs: NullFormCoeffs = field(default_factory=NullFormCoeffs)
    nonlinearity: Nonlinearity = Nonlinearity.NULL_FORM
    mode_ell: int = 0
    record_stride: int = 1
    blowup_factor: float = 1e3

    def __post_init__(self):
        object.__setattr__(self, "nonlinearity", Nonlinearity(self.nonlinearity))
        if self.t_final <= 0:
            raise ConfigError("t_final must be positive")
        if self.mode_ell < 0:
            raise ConfigError("mode_ell must be >= 0")
        if self.mode_ell > 0 and self.nonlinearity is not Nonlinearity.NONE:
            raise ConfigError("angular modes are only evolved for linear runs")
        if self.record_stride < 1:
            raise ConfigError("record_stride must be >= 1")
        speed = math.sqrt(1 + max(0.0, self.coeffs.amp_h))
        if self.grid.cfl * speed > 1 + 1e-12:
            raise ConfigError(f"dt/dr = {self.grid.cfl} exceeds 1/(max wave speed) = {1 / speed:.4f}")
        need = self.t_final + self.data.support_radius + 4 * self.grid.dr
        if self.grid.r_max < need:
            raise ConfigError(f"r_max = {self.grid.r_max} < t_final + support + 4 dr = {need}; "
                              "the outer boundary would not be causally silent")

    @property
    def n_steps(self) -> int:
        return int(math.ceil(self.t_final / self.grid.dt - 1e-9))

    def with_(self, **kw) -> "SimConfig":
        return replace(self, **kw)

    # --- flat key = value form ------------------------------------------

    def to_mapping(self) -> Dict[str, str]:
        f = kv.fmt_float
        S = self.null_coeffs
        m = {
            "r_max": f(self.grid.r_max), "n_cells": str(self.grid.n_cells),
            "cfl": f(self.grid.cfl), "cfl_bound": f(self.grid.cfl_bound), "t_final": f(self.t_final),
            "epsilon": f(self.data.epsilon), "support_radius": f(self.data.support_radius),
            "window": self.data.window.value, "phi0_poly": kv.fmt_floats(self.data.p0),
            "phi1_poly": kv.fmt_floats(self.data.p1),
            "amp_h": f(self.coeffs.amp_h), "amp_B": f(self.coeffs.amp_B),
            "amp_V": f(self.coeffs.amp_V), "amp_gw": f(self.coeffs.amp_gw),
            "sigma": str(self.coeffs.sigma), "null_scale": f(S.scale),
            "nonlinearity": self.nonlinearity.value, "mode_ell": str(self.mode_ell),
            "record_stride": str(self.record_stride), "blowup_factor": f(self.blowup_factor),
        }
        return m

    def to_text(self) -> str:
        return kv.format_kv(self.to_mapping())

    @classmethod
    def from_mapping(cls, m: Mapping[str, str]) -> "SimConfig":
        known = set(cls.defaults())
        extra = set(m) - known
        if extra:
            raise kv.ConfigParseError(f"unknown keys: {', '.join(sorted(extra))}")
        d = dict(cls.defaults())
        d.update(m)
        try:
            grid = Grid1D(kv.as_float(d["r_max"], "r_max"), kv.as_int(d["n_cells"], "n_cells"),
                          kv.as_float(d["cfl"], "cfl"), kv.as_float(d["cfl_bound"], "cfl_bound"))
            data = InitialData(kv.as_float(d["epsilon"], "epsilon"),
                               kv.as_float(d["support_radius"], "support_radius"),
                               Window(d["window"]), kv.as_floats(d["phi0_poly"], "phi0_poly"),
                               kv.as_floats(d["phi1_poly"], "phi1_poly"))
            coeffs = CoefficientProfile(*(kv.as_float(d[k], k) for k in
                                          ("amp_h", "amp_B", "amp_V", "amp_gw")),
                                        kv.as_fraction(d["sigma"], "sigma"))
            return cls(grid, kv.as_float(d["t_final"], "t_final"), data, coeffs,
                       NullFormCoeffs.q0(kv.as_float(d["null_scale"], "null_scale")),
                       Nonlinearity(d["nonlinearity"]), kv.as_int(d["mode_ell"], "mode_ell"),
                       kv.as_int(d["record_stride"], "record_stride"),
                       kv.as_float(d["blowup_factor"], "blowup_factor"))
        except ValueError as exc:
            if isinstance(exc, (kv.ConfigParseError, ConfigError)):
                raise
            raise kv.ConfigParseError(str(exc)) from exc

    @classmethod
    def from_text(cls, text: str, source: str = "<config>") -> "SimConfig":
        return cls.from_mapping(kv.parse_kv(text, source))

    @staticmethod
    def defaults() -> Dict[str, str]:
        return {"r_max": "40", "n_cells": "400", "cfl": "0.5", "cfl_bound": "0.5", "t_final": "20",
                "epsilon": "0.01", "support_radius": "4", "window": "bump",
                "phi0_poly": "1", "phi1_poly": "", "amp_h": "0", "amp_B": "0",
                "amp_V": "0", "amp_gw": "0", "sigma": "1/10", "null_scale": "1",
                "nonlinearity": "null_form", "mode_ell": "0", "record_stride": "1",
                "blowup_factor": "1000"}
