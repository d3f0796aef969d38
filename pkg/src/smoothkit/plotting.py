"""Static PNG figures rendered next to the TSV/JSON outputs.

Figures are built on bare ``matplotlib.figure.Figure`` objects (no pyplot
state) and saved without metadata so repeated runs give identical bytes.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import numpy as np
from matplotlib.figure import Figure

RC = {
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "lines.linewidth": 1.5,
    "svg.hashsalt": "smoothkit",
}
SIZE = (6.4, 4.0)
DPI = 110


def _figure(ncols=1, width=SIZE[0]):
    fig = Figure(figsize=(width, SIZE[1]), dpi=DPI, layout="constrained")
    axes = fig.subplots(1, ncols, squeeze=False)[0]
    return fig, axes


def _save(fig: Figure, path) -> None:
    with matplotlib.rc_context(RC):
        fig.savefig(path, format="png", metadata={"Software": None})


def _band(ax, curve, color, label):
    ax.fill_between(curve.grid, curve.lower, curve.upper, color=color, alpha=0.2, linewidth=0)
    ax.plot(curve.grid, curve.fit, color=color, label=label)


def plot_curve(curve, x, y, path, xlabel="x", ylabel="y", title=None) -> None:
    """Scatter, fitted curve with band and, when present, the derivative panel."""
    with matplotlib.rc_context(RC):
        has_deriv = curve.deriv is not None
        fig, axes = _figure(2 if has_deriv else 1, SIZE[0] * (1.8 if has_deriv else 1.0))
        ax = axes[0]
        ax.scatter(x, y, s=8, color="0.55", label="data")
        _band(ax, curve, "C0", "fit")
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        ax.legend(frameon=False)
        if title:
            ax.set_title(title)
        if has_deriv:
            axes[1].plot(curve.grid, curve.deriv, color="C3")
            axes[1].axhline(0.0, color="0.6", linewidth=0.8)
            axes[1].set_xlabel(xlabel)
            axes[1].set_ylabel("derivative")
    _save(fig, path)


def plot_diagnostics(diag, path) -> None:
    with matplotlib.rc_context(RC):
        fig, (ax1, ax2) = _figure(2, SIZE[0] * 1.8)
        ax1.scatter(diag.fitted, diag.resid, s=8, color="C0")
        ax1.axhline(0.0, color="0.5", linewidth=0.8)
        ax1.set_xlabel("fitted")
        ax1.set_ylabel("residual")
        ax2.scatter(diag.qq_theoretical, diag.qq_sample, s=8, color="C0")
        lim = [float(np.min(diag.qq_theoretical)), float(np.max(diag.qq_theoretical))]
        ax2.plot(lim, lim, color="0.5", linewidth=0.8)
        ax2.set_xlabel("normal quantile")
        ax2.set_ylabel("standardized residual")
    _save(fig, path)


def plot_components(components: dict, path, ylabel="partial effect") -> None:
    with matplotlib.rc_context(RC):
        fig, axes = _figure(len(components), SIZE[0] * max(1.0, 0.9 * len(components)))
        for ax, (name, curve) in zip(axes, components.items()):
            _band(ax, curve, "C0", name)
            ax.set_xlabel(name)
            ax.set_ylabel(ylabel)
    _save(fig, path)


def plot_comparison(x, y, truth, fits: dict, path, window=None) -> None:
    """Data, true mean and competing fits; ``window`` is shaded."""
    with matplotlib.rc_context(RC):
        fig, (ax,) = _figure()
        if window is not None:
            ax.axvspan(window[0], window[1], color="0.92", linewidth=0)
        ax.scatter(x, y, s=8, color="0.45", label="data")
        ax.plot(x, truth, color="k", linestyle="--", linewidth=1.0, label="truth")
        for i, (name, values) in enumerate(fits.items()):
            ax.plot(x, values, color=f"C{i}", label=name)
        ax.set_xlabel("x")
        ax.set_ylabel("y")
        ax.legend(frameon=False)
    _save(fig, path)
