"""Figures written next to the CSV output (PNG, Agg backend)."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

STYLE = {
    "axes.labelsize": 11,
    "axes.titlesize": 12,
    "font.size": 10,
    "legend.fontsize": 9,
    "lines.linewidth": 1.5,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "savefig.dpi": 120,
}


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def profile_figure(xs, means, errs, path, exact=None, fit=None, xlabel="r", title=None):
    """Point estimates with error bars, optionally against an exact curve and a fit."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.errorbar(xs, means, yerr=errs, fmt="o", ms=3, capsize=2, label="random walks")
        grid = np.linspace(min(xs), max(xs), 200)
        if exact is not None:
            ax.plot(grid, [exact(x) for x in grid], "k--", lw=1, label="exact")
        if fit is not None:
            ax.plot(grid, fit.predict(grid), "C1-", lw=1, label=f"{fit.model} fit")
        ax.set_xlabel(xlabel)
        ax.set_ylabel("u")
        if title:
            ax.set_title(title)
        ax.legend()
        return _save(fig, path)


def hitting_figure(stats, path, fit=None):
    r = [s.radius for s in stats]
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.plot(r, [s.mean_time for s in stats], "o", ms=3, label="E[tau]")
        ax.plot(r, [s.inner_mean_time if s.inner_mean_time is not None else np.nan
                    for s in stats], "v", ms=3, label="inner-absorbed")
        ax.plot(r, [s.outer_mean_time if s.outer_mean_time is not None else np.nan
                    for s in stats], "^", ms=3, label="outer-absorbed")
        if fit is not None:
            grid = np.linspace(min(r), max(r), 200)
            ax.plot(grid, fit.predict(grid), "k-", lw=1, label="quadratic fit")
        ax.set_xlabel("start radius")
        ax.set_ylabel("mean exit time")
        ax.legend()
        return _save(fig, path)


def grid_solution_figure(x, u, path, reference=None, envelope=None, title=None):
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.plot(x, u, "o-", ms=3, label="random walks")
        if reference is not None:
            ax.plot(x, reference, "k--", lw=1, label="finite differences")
        if envelope is not None:
            lo, hi = envelope
            ax.fill_between(x, lo(x), hi(x), color="C2", alpha=0.15, label="envelope")
        ax.set_xlabel("x")
        ax.set_ylabel("u")
        if title:
            ax.set_title(title)
        ax.legend()
        return _save(fig, path)


def fan_figure(curves, path):
    """One curve per parameter value; ``curves`` maps a label to ``(x, u)``."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(6, 4.5))
        for label, (x, u) in curves.items():
            ax.plot(x, u, lw=1.2, label=label)
        ax.plot([0, 1], [0, 1], "k:", lw=0.8)
        ax.set_xlabel("x")
        ax.set_ylabel("u")
        ax.legend(ncol=2)
        return _save(fig, path)
