"""Render sweep results to PNG files next to the CSV output.

The plots are a convenience view of the tables (currents on top,
rectification below); the CSV remains the authoritative output.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")  # headless; must precede pyplot import

import matplotlib.pyplot as plt  # noqa: E402

from .sweep import SweepRow  # noqa: E402


def _style(ax):
    ax.minorticks_on()
    ax.tick_params("both", top=True, right=True, direction="in", which="both")
    ax.grid(True, alpha=0.25)


def render_sweep_figure(
    curves: dict[str, list[SweepRow]],
    path: Path,
    title: str | None = None,
    varied_label: str = "T (varied bath)",
) -> Path:
    """Two-panel figure: forward/reverse currents (top) and R (bottom)."""
    fig, (ax_j, ax_r) = plt.subplots(2, 1, figsize=(7.0, 7.5), sharex=True)
    for label, rows in curves.items():
        ts = [row.T_varied for row in rows]
        ax_j.plot(ts, [row.J_forward for row in rows], "-", lw=1.8, label=f"{label} forward")
        ax_j.plot(ts, [row.J_reverse for row in rows], "--", lw=1.8, label=f"{label} reverse")
        if any(row.analytic_J is not None for row in rows):
            ax_j.plot(
                ts,
                [row.analytic_J for row in rows],
                ":",
                lw=1.4,
                label=f"{label} closed form",
            )
        ax_r.plot(ts, [row.R for row in rows], "-", lw=1.8, label=label)
    ax_j.set_ylabel(r"$J_R$")
    ax_r.set_ylabel(r"$\mathcal{R}$")
    ax_r.set_xlabel(varied_label)
    ax_r.set_ylim(-0.02, 1.02)
    for ax in (ax_j, ax_r):
        _style(ax)
        ax.legend(fontsize=8)
    if title:
        ax_j.set_title(title)
    fig.tight_layout()
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=160)
    plt.close(fig)
    return path
