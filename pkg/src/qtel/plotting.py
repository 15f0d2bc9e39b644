"""Figure rendering for the report commands.

Uses the Agg backend so figures render headless to files next to the
delimited output.
"""

from __future__ import annotations

from typing import List, Sequence, Tuple

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .tables import TableRow

_SWEEP_AXES = {
    "fisher-phi": ("phase (rad)", "Fisher information"),
    "resolution-alpha": ("attenuation factor", "resolution (microarcsec)"),
}


def save_curve_figure(rows: Sequence[Tuple[float, float]], sweep: str, title: str, path: str) -> None:
    xlabel, ylabel = _SWEEP_AXES[sweep]
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    ax.plot([r[0] for r in rows], [r[1] for r in rows], lw=1.5)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    if sweep == "resolution-alpha":
        ax.set_yscale("log")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_tables_figure(rows: List[TableRow], path: str) -> None:
    """Computed vs published optima, one marker pair per table row."""
    fig, (ax_res, ax_alpha) = plt.subplots(2, 1, figsize=(9.0, 7.0), sharex=True)
    xs = range(len(rows))
    labels = [f"{r.table}:N={r.photons},e={r.epsilon:g},I={r.overlap:g}" for r in rows]

    ax_res.plot(xs, [r.computed_delta_theta_uas for r in rows], "o", label="computed")
    ax_res.plot(xs, [r.published_delta_theta_uas for r in rows], "x", label="published")
    ax_res.set_ylabel("best resolution (microarcsec)")
    ax_res.set_yscale("log")
    ax_res.grid(True, alpha=0.3)
    ax_res.legend()

    ax_alpha.plot(xs, [r.computed_alpha for r in rows], "o", label="computed")
    ax_alpha.plot(xs, [r.published_alpha for r in rows], "x", label="published")
    ax_alpha.set_ylabel("optimal attenuation factor")
    ax_alpha.grid(True, alpha=0.3)
    ax_alpha.set_xticks(list(xs))
    ax_alpha.set_xticklabels(labels, rotation=75, fontsize=7)

    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
