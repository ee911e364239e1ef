"""Ranking quality measures: DCG/NDCG@k and Kendall tau.

NDCG uses exponential gain (2^rel - 1) with a log2(position + 1)
discount. Slates whose grades are all zero have no ideal ordering; their
NDCG is defined as 0 and they are excluded (and counted) when averaging.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import DataError

DEFAULT_K = 10


def dcg_at_k(relevances: Sequence[float], k: int) -> float:
    """Sum of (2^rel - 1) / log2(i + 1) over the first min(k, n) positions."""
    if k < 1:
        raise DataError(f"k must be >= 1, got {k!r}")
    total = 0.0
    for i, rel in enumerate(relevances[:k], start=1):
        if rel < 0:
            raise DataError(f"relevance must be >= 0, got {rel!r}")
        total += (2.0**rel - 1.0) / math.log2(i + 1)
    return total


def ndcg_at_k(relevances: Sequence[float], k: int = DEFAULT_K) -> float:
    """DCG of the given order divided by DCG of the ideal order.

    All-zero grades yield 0.0 (no ideal ordering exists); callers that
    average over slates should exclude such slates via :func:`has_signal`.
    """
    dcg = dcg_at_k(relevances, k)
    ideal = dcg_at_k(sorted(relevances, reverse=True), k)
    if ideal == 0.0:
        return 0.0
    return dcg / ideal


def has_signal(relevances: Sequence[float]) -> bool:
    """True when at least one grade is positive, i.e. NDCG is well defined."""
    return any(r > 0 for r in relevances)


def set_precision_recall(predicted: Iterable[str], reference: Iterable[str]) -> tuple[float, float]:
    """Set overlap measures: |p ∩ r| / |p| and |p ∩ r| / |r|.

    An empty predicted set has precision 0; the reference set must be
    non-empty.
    """
    predicted = set(predicted)
    reference = set(reference)
    if not reference:
        raise DataError("precision/recall need a non-empty reference set")
    hits = len(predicted & reference)
    precision = hits / len(predicted) if predicted else 0.0
    return precision, hits / len(reference)


def kendall_tau(ranking_a: Sequence[str], ranking_b: Sequence[str]) -> float:
    """(concordant - discordant) / C(n, 2) over all id pairs.

    Both arguments are orderings of the same id set. A single-element
    (or empty) ranking compares as 1.0.
    """
    if set(ranking_a) != set(ranking_b):
        raise DataError("rankings must cover the same id set")
    if len(set(ranking_a)) != len(ranking_a):
        raise DataError("rankings must not repeat ids")
    n = len(ranking_a)
    if n < 2:
        return 1.0
    pos_b = {item: i for i, item in enumerate(ranking_b)}
    concordant = 0
    discordant = 0
    for i in range(n):
        for j in range(i + 1, n):
            if pos_b[ranking_a[i]] < pos_b[ranking_a[j]]:
                concordant += 1
            else:
                discordant += 1
    return (concordant - discordant) / (n * (n - 1) / 2)


@dataclass(frozen=True)
class MetricReport:
    """One aggregated metric value over a set of slates."""

    name: str
    k: int | None
    value: float
    slate_count: int
    skipped: int = 0

    def to_row(self) -> dict:
        return {
            "metric": self.name,
            "k": self.k if self.k is not None else "",
            "value": float(self.value),
            "slates": self.slate_count,
            "skipped": self.skipped,
        }


def mean_ndcg_at_k(slates: Sequence[Sequence[float]], k: int = DEFAULT_K) -> MetricReport:
    """Mean NDCG@k over slates, excluding (and counting) all-zero slates."""
    values = []
    skipped = 0
    for rels in slates:
        if not has_signal(rels):
            skipped += 1
            continue
        values.append(ndcg_at_k(rels, k))
    mean = math.fsum(values) / len(values) if values else 0.0
    return MetricReport(name="ndcg", k=k, value=mean, slate_count=len(values), skipped=skipped)
