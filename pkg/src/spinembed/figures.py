"""Figure rendering for the report path.

Sweep and rainbow runs write a success-rate curve next to the delimited
output.  Rendering is opt-out; the JSONL/CSV artifacts never depend on it.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def render_rate_curve(
    rows: Sequence[dict],
    x_key: str,
    path: Path,
    x_label: str,
    title: str,
) -> None:
    xs = [row[x_key] for row in rows]
    ys = [row["success_rate"] for row in rows]
    fig, ax = plt.subplots(figsize=(5.0, 3.2))
    ax.plot(xs, ys, marker="o", lw=1.4)
    ax.set_xlabel(x_label)
    ax.set_ylabel("success rate")
    ax.set_ylim(-0.05, 1.05)
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_stage_histogram(stage_counts: dict, path: Path, title: str) -> None:
    stages = sorted(stage_counts)
    counts = [stage_counts[s] for s in stages]
    fig, ax = plt.subplots(figsize=(5.0, 3.2))
    ax.bar(range(len(stages)), counts)
    ax.set_xticks(range(len(stages)))
    ax.set_xticklabels(stages, rotation=30, ha="right", fontsize=8)
    ax.set_ylabel("trials")
    ax.set_title(title)
    fig.tight_layout()
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=150)
    plt.close(fig)
