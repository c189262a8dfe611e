"""Figures for sweep summaries: one metric against the sweep variable per file."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

LABELS = {
    "avg_payoff": "Average user payoff",
    "jain": "Jain's fairness index",
    "coverage": "Coverage",
    "reward_per_measurement": "Average reward per measurement",
    "surplus": "Social surplus",
}
AXIS = {"I": "Number of users $I$", "K": "Number of tasks $K$", "c_move": "Movement cost coefficient", "speed": "Movement speed (km/min)"}
STYLE = {
    "adts": dict(marker="o", color="tab:blue", label="ADTS"),
    "gc": dict(marker="s", color="tab:red", label="GC"),
    "gd": dict(marker="^", color="tab:green", label="GD"),
    "cta": dict(marker="x", color="k", linestyle="--", label="CTA"),
}


def plot_summary(summary: Sequence, sweep_var: str, prefix: Path) -> list[Path]:
    """Write ``<prefix>_<metric>.png`` for every metric; return the paths."""
    paths = []
    schemes = sorted({s.scheme for s in summary}, key=list(STYLE).index)
    for metric, label in LABELS.items():
        fig, ax = plt.subplots(figsize=(5.0, 3.6))
        for scheme in schemes:
            pts = sorted((s.sweep_value, s.means[metric], s.stderrs[metric]) for s in summary if s.scheme == scheme)
            xs, ys, es = zip(*pts)
            ax.errorbar(xs, ys, yerr=[1.96 * e for e in es], capsize=2, **STYLE[scheme])
        ax.set_xlabel(AXIS.get(sweep_var, sweep_var))
        ax.set_ylabel(label)
        ax.grid(alpha=0.3)
        ax.legend(frameon=False)
        fig.tight_layout()
        path = Path(f"{prefix}_{metric}.png")
        fig.savefig(path, dpi=120, metadata={"Software": None})
        plt.close(fig)
        paths.append(path)
    return paths
