"""Figure rendering for the CLI report path.

Each subcommand writes a PNG next to its CSV so a run leaves both the raw
table and a quick-look figure.  Rendering is headless (Agg).
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_METHOD_COLORS = {
    "ybaby": "tab:blue",
    "mybaby": "tab:red",
    "rk3": "tab:green",
    "adg": "tab:orange",
    "verlet": "tab:purple",
    "exact": "black",
}


def _color(name):
    return _METHOD_COLORS.get(name, "tab:gray")


def _save(fig, path: Path) -> None:
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)


def render_integrate(times, observables: dict, errors: dict, path: Path) -> None:
    """Energy/entropy evolution; absolute errors on log axes when available."""
    fig, axes = plt.subplots(1, 2, figsize=(11, 4))
    if errors:
        for ax, key, label in (
            (axes[0], "absErrE", "absolute error in total energy"),
            (axes[1], "absErrS", "absolute error in entropy"),
        ):
            err = np.asarray(errors[key])
            positive = err > 0
            ax.semilogy(times[positive], err[positive], lw=0.8, color="tab:blue")
            ax.set_xlabel("t")
            ax.set_ylabel(label)
            ax.grid(True, which="both", alpha=0.3)
    else:
        axes[0].plot(times, observables["E"], lw=0.8, color="tab:blue")
        axes[0].set_xlabel("t")
        axes[0].set_ylabel("total energy")
        axes[0].grid(True, alpha=0.3)
        axes[1].plot(times, observables["S"], lw=0.8, color="tab:red")
        axes[1].set_xlabel("t")
        axes[1].set_ylabel("entropy")
        axes[1].grid(True, alpha=0.3)
    fig.tight_layout()
    _save(fig, path)


def render_sweep(results, path: Path) -> None:
    """Log-log RMSE against stepsize with second/third order guide lines."""
    fig, axes = plt.subplots(1, 2, figsize=(11, 4.2))
    panels = (
        (axes[0], "RMSE in total energy", lambda p: p[1]),
        (axes[1], "RMSE in entropy", lambda p: p[2]),
    )
    for ax, label, pick in panels:
        hs_all = []
        for res in results:
            hs = [p[0] for p in res.points if pick(p) is not None]
            vals = [pick(p) for p in res.points if pick(p) is not None]
            if not hs:
                continue
            hs_all.extend(hs)
            ax.loglog(hs, vals, "o-", ms=3.5, lw=1, label=res.method, color=_color(res.method))
        if hs_all:
            href = np.array([min(hs_all), max(hs_all)])
            anchor = min(
                pick(p) for res in results for p in res.points if pick(p) is not None
            )
            for order, style in ((2, "--"), (3, ":")):
                ax.loglog(
                    href,
                    anchor * (href / href[0]) ** order,
                    style,
                    color="black",
                    lw=1,
                    label=f"order {order}",
                )
        ax.set_xlabel("stepsize h")
        ax.set_ylabel(label)
        ax.grid(True, which="both", alpha=0.3)
        ax.legend(fontsize=8)
    fig.tight_layout()
    _save(fig, path)


def render_dissipation(series: dict, slopes: dict, path: Path) -> None:
    """Log of local maxima against time with the fitted decay lines."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for name, pts in series.items():
        ts = np.array([p[0] for p in pts])
        ys = np.array([p[1] for p in pts])
        ax.plot(ts, ys, "o", ms=3, label=name, color=_color(name))
        if name in slopes and len(ts) > 1:
            slope = slopes[name]
            fit = ys[1] + slope * (ts - ts[1])
            ax.plot(ts, fit, "-", lw=0.8, alpha=0.7, color=_color(name))
    ax.set_xlabel("t")
    ax.set_ylabel("log of local maximum")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    _save(fig, path)


def render_structure(reports, path: Path) -> None:
    """Bar chart of structure residuals per method (log scale)."""
    fields = [
        ("two_form_residual", "two-form"),
        ("b12_residual", "B12-1"),
        ("b13_residual", "B13"),
        ("b23_residual", "B23"),
        ("energy_degeneracy_residual", "M dE"),
        ("modified_degeneracy_residual", "M_h dE_h"),
        ("rank_residual", "rank"),
    ]
    fig, ax = plt.subplots(figsize=(9, 4.5))
    width = 0.8 / max(1, len(reports))
    x = np.arange(len(fields))
    floor = 1e-17
    for i, rep in enumerate(reports):
        vals = [max(getattr(rep, f), floor) for f, _ in fields]
        ax.bar(x + i * width, vals, width, label=rep.method, color=_color(rep.method))
    ax.set_yscale("log")
    ax.set_xticks(x + 0.4 - width / 2)
    ax.set_xticklabels([lbl for _, lbl in fields], fontsize=8)
    ax.set_ylabel("max residual over sampled states")
    ax.grid(True, axis="y", which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    _save(fig, path)
