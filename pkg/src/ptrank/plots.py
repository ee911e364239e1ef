"""Report figures rendered next to the delimited outputs.

All rendering uses the Agg backend and strips the writer version from
the PNG metadata, so the same data yields the same bytes; figures are
safe to include in reproducibility comparisons.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

DPI = 120
# Deterministic output: drop the "Software: matplotlib x.y" PNG chunk.
_SAVE_KWARGS = {"dpi": DPI, "metadata": {"Software": None}}


def training_curves(traces: Sequence, path: str | Path) -> Path:
    """Train loss and validation NDCG per epoch, stacked panels."""
    epochs = [t.epoch for t in traces]
    fig, (ax_loss, ax_ndcg) = plt.subplots(2, 1, figsize=(7, 6), sharex=True)
    ax_loss.plot(epochs, [t.train_loss for t in traces], marker="o", color="tab:blue")
    ax_loss.set_ylabel("train loss")
    ax_loss.grid(True, alpha=0.3)
    ax_ndcg.plot(epochs, [t.val_ndcg for t in traces], marker="o", color="tab:green")
    ax_ndcg.set_ylabel("validation NDCG")
    ax_ndcg.set_xlabel("epoch")
    ax_ndcg.set_ylim(0.0, 1.05)
    ax_ndcg.grid(True, alpha=0.3)
    fig.suptitle("Training trace")
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, **_SAVE_KWARGS)
    plt.close(fig)
    return path


def ndcg_histogram(values: Sequence[float], k: int, path: str | Path) -> Path:
    """Distribution of per-slate NDCG@k."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.hist(list(values), bins=20, range=(0.0, 1.0), color="tab:blue", edgecolor="white")
    ax.set_xlabel(f"NDCG@{k}")
    ax.set_ylabel("slates")
    ax.set_title(f"Per-slate NDCG@{k}")
    ax.grid(True, axis="y", alpha=0.3)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, **_SAVE_KWARGS)
    plt.close(fig)
    return path


def agreement_bars(
    labels: Sequence[str],
    precisions: Sequence[float],
    recalls: Sequence[float],
    threshold: float,
    path: str | Path,
) -> Path:
    """Per-cell precision/recall bars against the acceptance threshold."""
    x = range(len(labels))
    width = 0.38
    fig, ax = plt.subplots(figsize=(max(7.0, 0.6 * len(labels) + 3), 4.5))
    ax.bar([i - width / 2 for i in x], precisions, width, label="precision", color="tab:blue")
    ax.bar([i + width / 2 for i in x], recalls, width, label="recall", color="tab:orange")
    ax.axhline(threshold, color="tab:red", linestyle="--", linewidth=1, label=f"threshold {threshold}")
    ax.set_xticks(list(x))
    ax.set_xticklabels(labels, rotation=45, ha="right", fontsize=8)
    ax.set_ylim(0.0, 1.05)
    ax.set_ylabel("agreement")
    ax.set_title("Labeler agreement by cell")
    ax.legend(loc="lower right")
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, **_SAVE_KWARGS)
    plt.close(fig)
    return path
