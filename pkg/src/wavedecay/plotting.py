"""Figures for the report path.

matplotlib is imported on first use with the non-interactive Agg backend, so
the numerical modules never pay for it.  Every figure is also available as a
plot-ready two-column text file; these functions only draw what those files
contain.  PNGs are written without timestamp metadata so that reruns
produce identical bytes.
"""
from __future__ import annotations

import math
import os
from typing import Dict, List, Optional, Sequence, Tuple

_PLT = None
_METADATA = {"Software": None}


def _pyplot():
    global _PLT
    if _PLT is None:
        import matplotlib
        matplotlib.use("Agg", force=True)
        import matplotlib.pyplot as plt
        _PLT = plt
    return _PLT


def _figure(width=4.8, aspect=1.35):
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(width, width / aspect), dpi=120)
    ax.tick_params(direction="in", which="both", top=True, right=True)
    return fig, ax


def _save(fig, path) -> str:
    fig.tight_layout()
    fig.savefig(path, metadata=_METADATA)
    _pyplot().close(fig)
    return os.fspath(path)


def plot_fit(samples: Sequence[Tuple[float, float]], slope: Optional[float],
             intercept: Optional[float], path, xlabel: str = "scale",
             ylabel: str = "sup |phi|", reference: Optional[float] = -1.0) -> str:
    """Log-log samples with the fitted line and, optionally, a reference slope through the first sample."""
    fig, ax = _figure()
    pos = [(x, y) for x, y in samples if x > 0 and y > 0]
    if not pos:
        ax.text(0.5, 0.5, "no positive samples", ha="center", va="center", transform=ax.transAxes)
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        return _save(fig, path)
    xs = [x for x, _ in pos]
    ys = [y for _, y in pos]
    ax.loglog(xs, ys, "o", color="k", ms=5, label="measured")
    if slope is not None and xs:
        fit = [math.exp(intercept) * x ** slope for x in xs]
        ax.loglog(xs, fit, "-", color="C0", lw=1.2, label=f"fit, slope {slope:.3f}")
    if reference is not None and xs:
        ref = [ys[0] * (x / xs[0]) ** reference for x in xs]
        ax.loglog(xs, ref, ":", color="0.5", lw=1.0, label=f"slope {reference:g}")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.legend(frameon=False, fontsize=8)
    return _save(fig, path)


def plot_history(history: Sequence[Tuple[float, float]], path, ylabel: str = "E_0(t) / E_0(0)",
                 normalize: bool = True, limit: Optional[float] = None) -> str:
    fig, ax = _figure()
    ts = [t for t, _ in history]
    vs = [v for _, v in history]
    if normalize and vs and vs[0] > 0:
        vs = [v / vs[0] for v in vs]
    ax.plot(ts, vs, "-", color="k", lw=1.2)
    if limit is not None:
        ax.axhline(limit, color="C3", lw=0.8, ls="--")
    ax.set_xlabel("t")
    ax.set_ylabel(ylabel)
    return _save(fig, path)


def plot_envelopes(constants: Dict[str, List[Tuple[float, float]]], path) -> str:
    """Per-T envelope constants on a log T axis, one line per envelope."""
    fig, ax = _figure()
    for i, (name, pts) in enumerate(sorted(constants.items())):
        ax.semilogx([t for t, _ in pts], [v for _, v in pts], "o-", color=f"C{i}", ms=4,
                    lw=1.0, label=name, base=2)
    ax.set_xlabel("T")
    ax.set_ylabel("weighted sup / epsilon")
    ax.set_ylim(bottom=0)
    ax.legend(frameon=False, fontsize=8)
    return _save(fig, path)


def plot_ratios(suites: Dict[str, Sequence[float]], path, band: float = 2.0) -> str:
    """Ratio lhs/rhs against sweep position, each suite normalized by its own minimum."""
    fig, ax = _figure(width=5.6)
    for i, (kind, ratios) in enumerate(sorted(suites.items())):
        good = [r for r in ratios if r > 0 and math.isfinite(r)]
        if not good:
            continue
        lo = min(good)
        ys = [r / lo if r > 0 and math.isfinite(r) else float("nan") for r in ratios]
        ax.plot(range(len(ys)), ys, "o-", color=f"C{i % 10}", ms=4, lw=1.0, label=kind)
    ax.axhline(band, color="0.4", lw=0.8, ls="--")
    ax.set_xlabel("sweep position")
    ax.set_ylabel("ratio / min ratio")
    ax.set_ylim(bottom=0.9)
    ax.legend(frameon=False, fontsize=7)
    return _save(fig, path)
