"""Leapfrog evolution of psi = r phi for P phi = Q(d phi, d phi) in radial symmetry.

With P = box + h d_r^2 + B^0 d_t + B^r d_r + V + g^w Delta_w / r^2 and
box = -d_t^2 + Delta, the mode-ell reduction reads

    psi_tt = psi_rr - l(l+1)(1 + g^w) psi / r^2
             + r (h phi_rr + B^r phi_r + B^0 phi_t + V phi - Q),

with Q = S^ab d_a phi d_b phi (or (d_t phi)^2 for the contrast run).  The
r-weighted terms are differenced on phi = psi / r, extended across r = 0 with
parity (-1)^l, so no 1/r singularity enters the stencils.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

from .config import Nonlinearity, SimConfig


class BlowupDetected(RuntimeError):
    def __init__(self, time: float, value: float):
        super().__init__(f"max |phi| = {value:.3g} exceeded the blowup threshold at t = {time:.6g}")
        self.time = time
        self.value = value


def phi_from_psi(psi: np.ndarray, dr: float, ell: int = 0) -> np.ndarray:
    """phi = psi / r, with the r = 0 value from a fourth-order odd-extension stencil."""
    phi = np.empty_like(psi)
    r = np.arange(1, psi.shape[-1]) * dr
    phi[..., 1:] = psi[..., 1:] / r
    if ell == 0:
        phi[..., 0] = (8 * psi[..., 1] - psi[..., 2]) / (6 * dr)
    else:
        phi[..., 0] = 0.0
    return phi


def _pad(f: np.ndarray, parity: float) -> np.ndarray:
    """One ghost cell on each side: reflected at r = 0, copied at r_max."""
    return np.concatenate([[parity * f[1]], f, [f[-1]]])


def d_r(f: np.ndarray, dr: float, parity: float) -> np.ndarray:
    g = _pad(f, parity)
    return (g[2:] - g[:-2]) / (2 * dr)


def d_rr(f: np.ndarray, dr: float, parity: float) -> np.ndarray:
    g = _pad(f, parity)
    return (g[2:] - 2 * g[1:-1] + g[:-2]) / (dr * dr)


def null_form_values(S: np.ndarray, dt_phi, dr_phi, angular=0.0, omega=(0.0, 0.0, 1.0)):
    """S^ab d_a phi d_b phi with d_i phi = omega_i d_r phi + (angular)_i."""
    dt_phi = np.asarray(dt_phi, dtype=float)
    dr_phi = np.asarray(dr_phi, dtype=float)
    om = np.asarray(omega, dtype=float)
    grad = dr_phi[..., None] * om + np.asarray(angular, dtype=float)
    S = np.asarray(S, dtype=float)
    return (S[0, 0] * dt_phi ** 2 + 2 * dt_phi * np.einsum("...i,i->...", grad, S[0, 1:])
            + np.einsum("...i,ij,...j->...", grad, S[1:, 1:], grad))


@dataclass
class Trajectory:
    config: SimConfig
    times: np.ndarray
    phi: np.ndarray       # (n_snapshots, n_cells + 1)
    dt_phi: np.ndarray
    _cache: Dict[str, np.ndarray] = field(default_factory=dict, repr=False, compare=False)

    @property
    def r(self) -> np.ndarray:
        return self.config.grid.r

    @property
    def dr(self) -> float:
        return self.config.grid.dr

    @property
    def parity(self) -> float:
        return -1.0 if self.config.mode_ell % 2 else 1.0

    @property
    def dr_phi(self) -> np.ndarray:
        if "dr_phi" not in self._cache:
            g = np.concatenate([self.parity * self.phi[:, 1:2], self.phi, self.phi[:, -1:]], axis=1)
            self._cache["dr_phi"] = (g[:, 2:] - g[:, :-2]) / (2 * self.dr)
        return self._cache["dr_phi"]

    def snapshot_index(self, t: float) -> int:
        i = int(np.argmin(np.abs(self.times - t)))
        return i

    def at(self, t: float) -> np.ndarray:
        return self.phi[self.snapshot_index(t)]


class _Rhs:
    def __init__(self, cfg: SimConfig):
        g = cfg.grid
        self.dr = g.dr
        self.r = g.r
        self.ell = cfg.mode_ell
        self.parity = -1.0 if self.ell % 2 else 1.0
        self.c = cfg.coeffs.arrays(self.r)
        self.flat = cfg.coeffs.flat
        self.kind = cfg.nonlinearity
        self.S = cfg.null_coeffs.matrix
        with np.errstate(divide="ignore"):
            inv_r2 = np.where(self.r > 0, 1.0 / np.maximum(self.r, 1e-300) ** 2, 0.0)
        self.ang = self.ell * (self.ell + 1) * (1 + self.c["gw"]) * inv_r2
        self.needs_dt = (self.kind is not Nonlinearity.NONE) or bool(np.any(self.c["B0"]))

    def __call__(self, psi: np.ndarray, psi_t: Optional[np.ndarray]) -> np.ndarray:
        dr, r = self.dr, self.r
        out = d_rr(psi, dr, -1.0)
        out[0] = 0.0
        if self.ell:
            out -= self.ang * psi
        if self.flat and self.kind is Nonlinearity.NONE:
            return out
        phi = phi_from_psi(psi, dr, self.ell)
        phi_r = d_r(phi, dr, self.parity)
        extra = np.zeros_like(psi)
        if not self.flat:
            c = self.c
            extra += c["h"] * d_rr(phi, dr, self.parity) + c["Br"] * phi_r + c["V"] * phi
        if self.needs_dt:
            phi_t = phi_from_psi(psi_t, dr, self.ell)
            if not self.flat:
                extra += self.c["B0"] * phi_t
            if self.kind is Nonlinearity.NULL_FORM:
                extra -= null_form_values(self.S, phi_t, phi_r)
            elif self.kind is Nonlinearity.SQUARE_DT_PHI:
                extra -= phi_t * phi_t
        return out + r * extra


def _initial_psi(cfg: SimConfig):
    r = cfg.grid.r
    return r * cfg.data.phi0(r), r * cfg.data.phi1(r)


def evolve(config: SimConfig, corrector_passes: int = 2) -> Trajectory:
    """Evolve to t_final, recording every ``record_stride`` steps.

    Terms with d_t phi are evaluated at the centred level by a short fixed-point
    iteration on the new time level (predictor from a second-order backward
    difference), which keeps the scheme second order.
    """
    cfg = config
    dt, dr = cfg.grid.dt, cfg.grid.dr
    rhs = _Rhs(cfg)
    threshold = cfg.blowup_factor * max(cfg.data.epsilon, 1e-300)

    psi0, psit0 = _initial_psi(cfg)
    # Taylor start: psi^1 = psi^0 + dt psi_t + dt^2/2 psi_tt
    psi1 = psi0 + dt * psit0 + 0.5 * dt * dt * rhs(psi0, psit0)
    psi1[0] = 0.0
    psi1[-1] = 0.0

    n_rec = cfg.n_steps // cfg.record_stride + 1
    times = np.empty(n_rec)
    phis = np.empty((n_rec, cfg.grid.n_cells + 1))
    dts = np.empty_like(phis)
    times[0] = 0.0
    phis[0] = phi_from_psi(psi0, dr, cfg.mode_ell)
    dts[0] = phi_from_psi(psit0, dr, cfg.mode_ell)

    inv_r = 1.0 / cfg.grid.r[1:]
    with np.errstate(over="ignore", invalid="ignore"):
        rec = _march(cfg, rhs, corrector_passes, None, psi0, psi1, inv_r, threshold,
                     times, phis, dts)
    return Trajectory(cfg, times[:rec], phis[:rec], dts[:rec])


def _march(cfg, rhs, corrector_passes, prev2, prev, cur, inv_r, threshold, times, phis, dts):
    dt, dr = cfg.grid.dt, cfg.grid.dr
    stride = cfg.record_stride
    rec = 1
    for n in range(1, cfg.n_steps + 1):
        # cur is level n, prev is level n-1; compute level n+1
        if rhs.needs_dt:
            if prev2 is None:
                psi_t = (cur - prev) / dt
            else:
                psi_t = (3 * cur - 4 * prev + prev2) / (2 * dt)
            nxt = 2 * cur - prev + dt * dt * rhs(cur, psi_t)
            for _ in range(corrector_passes):
                psi_t = (nxt - prev) / (2 * dt)
                nxt = 2 * cur - prev + dt * dt * rhs(cur, psi_t)
        else:
            nxt = 2 * cur - prev + dt * dt * rhs(cur, None)
        nxt[0] = 0.0
        nxt[-1] = 0.0
        peak = float(np.max(np.abs(nxt[1:] * inv_r)))
        if not peak <= threshold:  # also catches nan
            raise BlowupDetected((n + 1) * dt, peak)
        if n % stride == 0:
            times[rec] = n * dt
            phis[rec] = phi_from_psi(cur, dr, cfg.mode_ell)
            dts[rec] = phi_from_psi((nxt - prev) / (2 * dt), dr, cfg.mode_ell)
            rec += 1
        prev2, prev, cur = prev, cur, nxt
    return rec


# --- discrete consistency ----------------------------------------------------

def _d1_4(f, h, axis):
    f = np.moveaxis(f, axis, -1)
    out = (-f[..., 4:] + 8 * f[..., 3:-1] - 8 * f[..., 1:-3] + f[..., :-4]) / (12 * h)
    return np.moveaxis(out, -1, axis)


def _d2_4(f, h, axis):
    f = np.moveaxis(f, axis, -1)
    out = (-f[..., 4:] + 16 * f[..., 3:-1] - 30 * f[..., 2:-2] + 16 * f[..., 1:-3] - f[..., :-4]) / (12 * h * h)
    return np.moveaxis(out, -1, axis)


def operator_values(traj: Trajectory):
    """P phi and Q(d phi, d phi) by fourth-order stencils.

    Returns ``(P, Q, t, r)`` on snapshots 2..m-3 and grid points 0..n-2; ``Q`` is
    zero for linear runs.  Rows at the r = 0 point are not meaningful for P.
    """
    cfg = traj.config
    if len(traj.times) < 5:
        raise ValueError("need at least five snapshots")
    ht = float(traj.times[1] - traj.times[0])
    dr = traj.dr
    par = traj.parity
    phi = np.concatenate([par * traj.phi[:, 2:0:-1], traj.phi], axis=1)  # two ghost cells
    r = np.concatenate([-traj.r[2:0:-1], traj.r])
    # stencil centres: snapshots 2..m-3, grid points 0..n-2 (the original indices)
    core = (slice(2, -2), slice(2, -2))
    f = phi[core]
    rr = r[2:-2]
    ftt = _d2_4(phi[:, 2:-2], ht, 0)
    frr = _d2_4(phi[2:-2], dr, 1)
    fr = _d1_4(phi[2:-2], dr, 1)
    ft = _d1_4(phi[:, 2:-2], ht, 0)
    ell = cfg.mode_ell
    with np.errstate(divide="ignore", invalid="ignore"):
        lap = frr + 2 * fr / rr - ell * (ell + 1) * f / rr ** 2
    c = cfg.coeffs.arrays(np.abs(rr))
    Pf = -ftt + lap + c["h"] * frr + c["B0"] * ft + c["Br"] * fr + c["V"] * f
    if ell:
        with np.errstate(divide="ignore", invalid="ignore"):
            Pf -= c["gw"] * ell * (ell + 1) * f / rr ** 2
    if cfg.nonlinearity is Nonlinearity.NULL_FORM:
        Q = null_form_values(cfg.null_coeffs.matrix, ft, fr)
    elif cfg.nonlinearity is Nonlinearity.SQUARE_DT_PHI:
        Q = ft * ft
    else:
        Q = np.zeros_like(Pf)
    return Pf, Q, traj.times[2:-2], rr


def operator_residual(traj: Trajectory, r_min: float = 1.0) -> np.ndarray:
    """|P phi - Q| on interior (snapshot, grid) points, with fourth-order stencils."""
    Pf, Q, _, rr = operator_values(traj)
    mask = rr >= r_min
    return np.abs(Pf - Q)[:, mask]


def residual_norm(traj: Trajectory, config: Optional[SimConfig] = None, r_min: float = 1.0) -> float:
    """Max over interior points of |discrete P phi - Q(d phi, d phi)|."""
    if config is not None and config != traj.config:
        raise ValueError("trajectory was produced with a different config")
    res = operator_residual(traj, r_min)
    return float(res.max()) if res.size else 0.0
