"""Closed-form radial free waves (d'Alembert on psi = r phi)."""
from __future__ import annotations

import numpy as np

from .config import InitialData

_GL_X, _GL_W = np.polynomial.legendre.leggauss(48)


def _odd(data_fn, s):
    # Psi(s) = s * f(|s|): the odd extension of r f(r)
    return s * data_fn(np.abs(s))


def _integral_psi1(data: InitialData, lo, hi, panels: int = 8):
    """int_lo^hi s phi1(|s|) ds, Gauss-Legendre on panels clipped to the support."""
    R = data.support_radius
    sign = np.where(hi >= lo, 1.0, -1.0)
    lo, hi = np.minimum(lo, hi), np.maximum(lo, hi)
    # the integrand is odd, so [lo, -lo] cancels exactly when lo < 0 < -lo <= hi
    lo = np.where(-lo <= hi, np.abs(lo), lo)
    lo = np.clip(lo, -R, R)
    hi = np.clip(hi, -R, R)
    width = (hi - lo) / panels
    total = np.zeros(np.broadcast(lo, hi).shape)
    for k in range(panels):
        a = lo + k * width
        mid = a + 0.5 * width
        s = mid[..., None] + 0.5 * width[..., None] * _GL_X
        total += 0.5 * width * np.sum(_GL_W * _odd(data.phi1, s), axis=-1)
    return sign * total


def free_wave_exact(data: InitialData, t, r):
    """phi(t, r) for box phi = 0 with radial data; r = 0 handled by its limit."""
    t = np.asarray(t, dtype=float)
    r = np.asarray(r, dtype=float)
    t, r = np.broadcast_arrays(t, r)
    out = np.empty(t.shape)
    small = r < 1e-8
    big = ~small
    if np.any(big):
        tb, rb = t[big], r[big]
        psi = 0.5 * (_odd(data.phi0, rb + tb) + _odd(data.phi0, rb - tb))
        if data.p1:
            psi = psi + 0.5 * _integral_psi1(data, rb - tb, rb + tb)
        out[big] = psi / rb
    if np.any(small):
        ts = t[small]
        # d/dr at r = 0 of the d'Alembert formula: Psi0'(t) + Psi1(t)
        f, df = data.phi0(ts, deriv=True)
        val = f + ts * df
        if data.p1:
            val = val + ts * data.phi1(ts)
        out[small] = val
    return out if out.shape else float(out)


def free_wave_dt_exact(data: InitialData, t, r):
    """d_t phi for the free wave, by differentiating d'Alembert (r > 0)."""
    t = np.asarray(t, dtype=float)
    r = np.asarray(r, dtype=float)

    def dpsi0(s):
        f, df = data.phi0(np.abs(s), deriv=True)
        return f + np.abs(s) * df

    psi_t = 0.5 * (dpsi0(r + t) - dpsi0(r - t))
    if data.p1:
        psi_t = psi_t + 0.5 * (_odd(data.phi1, r + t) + _odd(data.phi1, r - t))
    return psi_t / r
