"""Figure rendering for the report-producing commands.

The expansion report gets two figures next to its TSV: the dictionary
growth curve and the per-iteration extraction/harvest bars. The scorer
can render a P/R/F0.5 bar chart next to its scores table. Everything
goes through the Agg backend so runs stay headless.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .expansion import IterationReport
from .gecscore import Scores


def render_expansion_figures(reports: Sequence[IterationReport],
                             output_dir: str | Path) -> list[Path]:
    """Write dictionary_growth.png and extraction_counts.png; returns the
    written paths."""
    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    iterations = [r.iteration for r in reports]
    written = []

    fig, ax1 = plt.subplots(figsize=(7, 4))
    ax1.plot(iterations, [r.dict_size for r in reports], "o-", color="tab:blue",
             label="dictionary size")
    ax1.set_xlabel("iteration")
    ax1.set_ylabel("dictionary size", color="tab:blue")
    ax1.set_xticks(iterations)
    ax2 = ax1.twinx()
    ax2.bar(iterations, [r.dict_delta for r in reports], alpha=0.3,
            color="tab:orange", label="entries added")
    ax2.set_ylabel("entries added", color="tab:orange")
    ax1.set_title("Spelling dictionary growth to fixpoint")
    fig.tight_layout()
    path = output_dir / "dictionary_growth.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(path)

    fig, ax = plt.subplots(figsize=(7, 4))
    width = 0.4
    ax.bar([i - width / 2 for i in iterations], [r.extracted_texts for r in reports],
           width=width, label="extracted texts")
    ax.bar([i + width / 2 for i in iterations], [r.distinct_words for r in reports],
           width=width, label="distinct words")
    ax.set_xlabel("iteration")
    ax.set_ylabel("count")
    ax.set_xticks(iterations)
    ax.set_title("Per-iteration extraction and harvest")
    ax.legend()
    fig.tight_layout()
    path = output_dir / "extraction_counts.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(path)
    return written


def render_score_figure(scores: Scores, mode: str, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(5, 4))
    names = ["Precision", "Recall", "F0.5"]
    values = [scores.precision, scores.recall, scores.f_half]
    bars = ax.bar(names, values, color=["tab:blue", "tab:orange", "tab:green"])
    ax.set_ylim(0, 1.05)
    ax.set_title(f"{mode} (TP={scores.tp} FP={scores.fp} FN={scores.fn})")
    for bar, value in zip(bars, values):
        ax.text(bar.get_x() + bar.get_width() / 2, value + 0.02, f"{value:.4f}",
                ha="center", fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
