"""Fixed-weight linear scorer and per-(topic, locale) ranking.

The default weight profile is the hand-calibrated one used before any
labeled data existed. Its weights deliberately sum to 0.95, not 1.0;
they are kept as calibrated rather than renormalized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .catalog import FEATURE_NAMES, Locale
from .errors import ConfigError, DataError
from .features import NumericFeatures

DEFAULT_WEIGHTS: dict[str, float] = {
    "popularity": 0.3,
    "brand_mission_alignment": 0.1,
    "eligible_article_count_7d": 0.05,
    "high_quality_doc_ratio": 0.1,
    "provider_doc_ratio": 0.1,
    "click_dwell_time": 0.1,
    "ctr": 0.1,
    "user_feedback": 0.1,
}


@dataclass(frozen=True)
class WeightProfile:
    """Non-negative weight per numeric feature; all 8 keys required."""

    weights: Mapping[str, float]

    def __post_init__(self):
        if set(self.weights) != set(FEATURE_NAMES):
            missing = sorted(set(FEATURE_NAMES) - set(self.weights))
            extra = sorted(set(self.weights) - set(FEATURE_NAMES))
            raise ConfigError(f"weight profile key mismatch (missing={missing}, extra={extra})")
        for name, w in self.weights.items():
            if not math.isfinite(w) or w < 0:
                raise ConfigError(f"weight for {name!r} must be finite and >= 0, got {w!r}")

    @classmethod
    def default(cls) -> "WeightProfile":
        return cls(dict(DEFAULT_WEIGHTS))

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, float]) -> "WeightProfile":
        return cls({str(k): float(v) for k, v in mapping.items()})


@dataclass(frozen=True)
class RankedSlate:
    """Providers in score-descending order; rank is the 1-based position."""

    topic: str
    locale: Locale
    entries: tuple[tuple[str, float], ...]

    def __post_init__(self):
        providers = [p for p, _ in self.entries]
        if len(set(providers)) != len(providers):
            raise DataError(f"ranked slate for {self.topic!r} has duplicate providers")
        scores = [s for _, s in self.entries]
        if any(scores[i] < scores[i + 1] for i in range(len(scores) - 1)):
            raise DataError(f"ranked slate for {self.topic!r} is not score-descending")

    def providers(self) -> list[str]:
        return [p for p, _ in self.entries]

    def __len__(self) -> int:
        return len(self.entries)

    def to_record(self) -> dict:
        return {
            "topic": self.topic,
            "locale": str(self.locale),
            "items": [{"provider": p, "score": float(s)} for p, s in self.entries],
        }

    @classmethod
    def from_record(cls, obj: dict, path: str = "<memory>", lineno: int = 0) -> "RankedSlate":
        try:
            entries = tuple((it["provider"], float(it["score"])) for it in obj["items"])
            return cls(topic=obj["topic"], locale=Locale.parse(obj["locale"]), entries=entries)
        except (KeyError, TypeError, ValueError) as exc:
            raise DataError(f"bad ranking record: {exc}", path=path, line=lineno) from None


def score_linear(numeric: NumericFeatures, weights: WeightProfile) -> float:
    """Weighted sum over features, accumulated in canonical feature order."""
    if set(weights.weights) != set(numeric.values):
        raise ConfigError("weight profile does not match the numeric feature keys")
    total = 0.0
    for name in FEATURE_NAMES:
        total += weights.weights[name] * numeric.values[name]
    return total


def rank_topic(
    topic: str,
    locale: Locale,
    cells: Sequence[tuple[str, NumericFeatures]],
    weights: WeightProfile | None = None,
) -> RankedSlate:
    """Score every provider and sort descending, ties by ascending id."""
    if not cells:
        raise DataError(f"no providers to rank for topic {topic!r}")
    providers = [p for p, _ in cells]
    if len(set(providers)) != len(providers):
        raise DataError(f"duplicate provider in ranking input for topic {topic!r}")
    if weights is None:
        weights = WeightProfile.default()
    scored = [(provider, score_linear(numeric, weights)) for provider, numeric in cells]
    scored.sort(key=lambda e: (-e[1], e[0]))
    return RankedSlate(topic=topic, locale=locale, entries=tuple(scored))


def top_k(slate: RankedSlate, k: int) -> RankedSlate:
    """First min(k, len) entries, order preserved."""
    if k < 1:
        raise ConfigError(f"k must be >= 1, got {k!r}")
    return RankedSlate(topic=slate.topic, locale=slate.locale, entries=slate.entries[:k])


def read_rankings(path) -> list[RankedSlate]:
    from .catalog import read_jsonl

    return [RankedSlate.from_record(obj, str(path), lineno) for lineno, obj in read_jsonl(path)]


def write_rankings(path, slates: Sequence[RankedSlate]) -> int:
    from .catalog import write_jsonl

    return write_jsonl(path, (s.to_record() for s in slates))
