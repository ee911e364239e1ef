"""Content-level multiplicative signal derived from provider rankings.

Per (topic, locale) slate the raw ranking scores are mapped into
[floor, 1.0]; a content item then averages its provider's scores over
its top-3 topics by confidence. The result is one multiplicand in the
serving-side product of opaque signals, with 1.0 the neutral element,
so missing data reweights nothing and a floor above 0 never annihilates
content outright.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .catalog import ContentItem
from .errors import ConfigError, DataError
from .weak import RankedSlate

DEFAULT_FLOOR = 0.1
TOP_TOPICS = 3


def _check_floor(floor: float) -> float:
    if not 0.0 < floor < 1.0:
        raise ConfigError(f"floor must be inside (0, 1), got {floor!r}")
    return floor


def normalize_slate_scores(slate: RankedSlate, floor: float = DEFAULT_FLOOR) -> list[tuple[str, float]]:
    """Affine map of a slate's raw scores onto [floor, 1.0].

    The top score maps to 1.0 and the bottom to ``floor``; order is
    preserved exactly. Degenerate slates (single provider, or all scores
    equal) map to 1.0 everywhere.
    """
    _check_floor(floor)
    if not slate.entries:
        raise DataError(f"cannot normalize an empty slate for topic {slate.topic!r}")
    scores = [s for _, s in slate.entries]
    hi, lo = scores[0], scores[-1]
    if hi == lo:
        return [(p, 1.0) for p, _ in slate.entries]
    span = hi - lo
    # roundoff in the affine map can land a hair outside the band; the
    # exported range is contractual, so clamp
    return [
        (p, min(1.0, max(floor, floor + (1.0 - floor) * (s - lo) / span)))
        for p, s in slate.entries
    ]


@dataclass
class SignalTable:
    """Normalized score per (topic, provider, locale); read-only once built."""

    floor: float = DEFAULT_FLOOR
    scores: dict[tuple[str, str, str], float] = field(default_factory=dict)

    def get(self, topic: str, provider: str, locale: str) -> float | None:
        return self.scores.get((topic, provider, locale))

    def __len__(self) -> int:
        return len(self.scores)

    def to_rows(self) -> list[dict]:
        return [
            {"topic": t, "provider": p, "locale": loc, "score": self.scores[(t, p, loc)]}
            for t, p, loc in sorted(self.scores)
        ]

    @classmethod
    def from_rows(cls, rows: Iterable[dict], floor: float = DEFAULT_FLOOR) -> "SignalTable":
        table = cls(floor=_check_floor(floor))
        for row in rows:
            try:
                key = (row["topic"], row["provider"], row["locale"])
                score = float(row["score"])
            except (KeyError, TypeError, ValueError) as exc:
                raise DataError(f"bad signal table row: {exc}") from None
            if not floor <= score <= 1.0:
                raise DataError(f"signal for {key} is {score!r}, outside [{floor}, 1.0]")
            if key in table.scores:
                raise DataError(f"duplicate signal table entry for {key}")
            table.scores[key] = score
        return table


def build_signal_table(slates: Iterable[RankedSlate], floor: float = DEFAULT_FLOOR) -> SignalTable:
    """Normalize every slate and collect the entries into one table."""
    table = SignalTable(floor=_check_floor(floor))
    seen_cells: set[tuple[str, str]] = set()
    for slate in slates:
        cell = (slate.topic, str(slate.locale))
        if cell in seen_cells:
            raise DataError(f"duplicate ranking for cell {cell}")
        seen_cells.add(cell)
        for provider, score in normalize_slate_scores(slate, floor):
            table.scores[(slate.topic, provider, str(slate.locale))] = score
    return table


@dataclass(frozen=True)
class PxTSignal:
    """A content item's multiplicative score with its contributing topics."""

    content_id: str
    score: float
    topics: tuple[tuple[str, float], ...] = ()
    flags: tuple[str, ...] = ()

    def __post_init__(self):
        if len(self.topics) > TOP_TOPICS:
            raise DataError(f"signal for {self.content_id!r} lists more than {TOP_TOPICS} topics")

    def to_record(self) -> dict:
        return {
            "content_id": self.content_id,
            "score": float(self.score),
            "topics": [{"topic": t, "score": float(s)} for t, s in self.topics],
            "flags": list(self.flags),
        }


def content_pxt(content: ContentItem, table: SignalTable, floor: float = DEFAULT_FLOOR) -> PxTSignal:
    """Average the provider's scores over the content's best topics.

    The best 3 topics are chosen by descending confidence, ties broken by
    topic id, so the result does not depend on topic listing order.
    Topics absent from the table contribute nothing; when none are found
    the signal is the neutral 1.0, flagged ``cold_content``.
    """
    _check_floor(floor)
    best = sorted(content.topics, key=lambda tc: (-tc[1], tc[0]))[:TOP_TOPICS]
    found: list[tuple[str, float]] = []
    for topic, _ in best:
        score = table.get(topic, content.provider, str(content.locale))
        if score is not None:
            found.append((topic, score))
    if not found:
        return PxTSignal(content_id=content.content_id, score=1.0, topics=(), flags=("cold_content",))
    mean = statistics.mean(score for _, score in found)
    clamped = min(1.0, max(floor, mean))
    return PxTSignal(content_id=content.content_id, score=clamped, topics=tuple(found))


def compose_multiplicative(other_signals: Sequence[float], pxt: PxTSignal | float) -> float:
    """Product of the opaque serving signals and the content signal.

    Commutative and associative in its multiplicands; a neutral 1.0
    content score leaves the product of the others unchanged.
    """
    score = pxt.score if isinstance(pxt, PxTSignal) else float(pxt)
    for value in [*other_signals, score]:
        if not math.isfinite(value) or value <= 0:
            raise DataError(f"signals must be finite and > 0 to compose, got {value!r}")
    return math.prod(other_signals) * score


def export_signals(
    contents: Iterable[ContentItem], table: SignalTable, floor: float = DEFAULT_FLOOR
) -> list[PxTSignal]:
    """One signal per content item, in input order."""
    return [content_pxt(content, table, floor) for content in contents]
