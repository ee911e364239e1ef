"""Turns daily snapshots into normalized model inputs.

Per (provider, topic, locale) cell: recency-weighted averaging over a
day window, then min-max normalization across the cohort of providers
sharing the (topic, locale), then assembly with the two embeddings. The
brand/topic alignment feature is recomputed from the embeddings as
``(cosine + 1) / 2`` so it shares the [0, 1] range of the other features.
"""

from __future__ import annotations

import datetime as _dt
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .catalog import FEATURE_NAMES, EmbeddingRecord, FeatureSnapshot, Locale
from .errors import ConfigError, DataError

DEFAULT_DECAY = 0.8
DEFAULT_WINDOW_DAYS = 7


@dataclass(frozen=True)
class NumericFeatures:
    """The 8 normalized numeric features, each in [0, 1]."""

    values: Mapping[str, float]

    def __post_init__(self):
        if set(self.values) != set(FEATURE_NAMES):
            missing = sorted(set(FEATURE_NAMES) - set(self.values))
            extra = sorted(set(self.values) - set(FEATURE_NAMES))
            raise DataError(f"numeric features key mismatch (missing={missing}, extra={extra})")
        for name, value in self.values.items():
            if not math.isfinite(value) or not 0.0 <= value <= 1.0:
                raise DataError(f"numeric feature {name!r} must be in [0,1], got {value!r}")

    def __getitem__(self, name: str) -> float:
        return self.values[name]

    def as_array(self) -> np.ndarray:
        """Values in canonical FEATURE_NAMES order as a float64 vector."""
        return np.array([self.values[name] for name in FEATURE_NAMES], dtype=np.float64)


@dataclass(frozen=True)
class AssembledInput:
    """Model input for one provider: two embeddings plus the numeric block."""

    mission_embedding: np.ndarray
    topic_embedding: np.ndarray
    numeric: NumericFeatures

    def __post_init__(self):
        if self.mission_embedding.shape != self.topic_embedding.shape or self.mission_embedding.ndim != 1:
            raise DataError(
                f"embedding shapes differ: {self.mission_embedding.shape} vs {self.topic_embedding.shape}"
            )


def recency_weighted_average(
    series: Iterable[tuple[_dt.date, float]],
    decay: float = DEFAULT_DECAY,
    window_days: int = DEFAULT_WINDOW_DAYS,
    as_of: _dt.date | None = None,
) -> float:
    """Exponentially decayed mean over the trailing window.

    A value observed ``age`` days before ``as_of`` carries weight
    ``decay ** age``; days with no observation contribute nothing. An
    empty effective series yields 0. Duplicate dates keep the last value.
    """
    if not 0.0 < decay <= 1.0:
        raise ConfigError(f"decay must be in (0, 1], got {decay!r}")
    if window_days < 1:
        raise ConfigError(f"window_days must be >= 1, got {window_days!r}")
    by_day: dict[_dt.date, float] = {}
    for day, value in series:
        if not math.isfinite(value):
            raise DataError(f"non-finite value {value!r} on {day.isoformat()}")
        by_day[day] = value
    if as_of is None:
        if not by_day:
            return 0.0
        as_of = max(by_day)
    num = 0.0
    den = 0.0
    for day in sorted(by_day):
        age = (as_of - day).days
        if 0 <= age < window_days:
            w = decay**age
            num += w * by_day[day]
            den += w
    return num / den if den > 0 else 0.0


def normalize_cohort(cells: Sequence[tuple[object, float]]) -> list[tuple[object, float]]:
    """Min-max map raw cohort values into [0, 1], preserving order.

    A degenerate cohort (max == min) maps everything to 0.5.
    """
    if not cells:
        raise DataError("cohort is empty")
    for key, value in cells:
        if not math.isfinite(value):
            raise DataError(f"non-finite raw value for cell {key!r}")
    values = [value for _, value in cells]
    lo, hi = min(values), max(values)
    if hi == lo:
        return [(key, 0.5) for key, _ in cells]
    span = hi - lo
    return [(key, (value - lo) / span) for key, value in cells]


def cosine_alignment(mission: np.ndarray, topic_def: np.ndarray) -> float:
    """Cosine similarity between mission and topic vectors, in [-1, 1]."""
    mission = np.asarray(mission, dtype=np.float64)
    topic_def = np.asarray(topic_def, dtype=np.float64)
    if mission.shape != topic_def.shape:
        raise DataError(f"vector shapes differ: {mission.shape} vs {topic_def.shape}")
    nm = float(np.linalg.norm(mission))
    nt = float(np.linalg.norm(topic_def))
    if nm == 0.0 or nt == 0.0:
        raise DataError("alignment undefined for a zero vector")
    value = float(np.dot(mission, topic_def) / (nm * nt))
    return max(-1.0, min(1.0, value))


@dataclass
class EmbeddingIndex:
    """Lookup of mission and topic-definition vectors by subject id."""

    missions: dict[str, np.ndarray] = field(default_factory=dict)
    topics: dict[str, np.ndarray] = field(default_factory=dict)

    @classmethod
    def from_records(cls, records: Iterable[EmbeddingRecord]) -> "EmbeddingIndex":
        index = cls()
        for record in records:
            vec = np.array(record.vector, dtype=np.float64)
            if record.kind == "provider_mission":
                index.missions[record.subject_id] = vec
            else:
                index.topics[record.subject_id] = vec
        return index

    def mission(self, provider: str) -> np.ndarray:
        if provider not in self.missions:
            raise DataError(f"missing provider_mission embedding for {provider!r}")
        return self.missions[provider]

    def topic(self, topic_id: str) -> np.ndarray:
        if topic_id not in self.topics:
            raise DataError(f"missing topic_definition embedding for {topic_id!r}")
        return self.topics[topic_id]


def assemble_inputs(
    topic: str,
    locale: Locale,
    snapshots: Iterable[FeatureSnapshot],
    embeddings: EmbeddingIndex,
    decay: float = DEFAULT_DECAY,
    window_days: int = DEFAULT_WINDOW_DAYS,
    as_of: _dt.date | None = None,
) -> dict[str, AssembledInput]:
    """Assemble model inputs for every provider in one (topic, locale) cohort.

    Snapshots for other cells are ignored. Per provider and feature the
    daily series is recency-averaged, then each feature is min-max
    normalized across the cohort; the alignment feature is replaced by
    the rescaled embedding cosine. Providers with no snapshot days are
    simply absent from the result (missing-cell policy: exclude, not
    impute). Raises if a needed embedding is missing.
    """
    series: dict[str, dict[str, list[tuple[_dt.date, float]]]] = {}
    max_date: _dt.date | None = None
    for snap in snapshots:
        if snap.topic != topic or snap.locale != locale:
            continue
        per_feature = series.setdefault(snap.provider, {})
        for name, value in snap.values.items():
            per_feature.setdefault(name, []).append((snap.date, value))
        max_date = snap.date if max_date is None else max(max_date, snap.date)
    if not series:
        return {}
    if as_of is None:
        as_of = max_date

    providers = sorted(series)
    topic_vec = embeddings.topic(topic)

    averaged: dict[str, dict[str, float]] = {
        provider: {
            name: recency_weighted_average(values, decay, window_days, as_of)
            for name, values in series[provider].items()
        }
        for provider in providers
    }

    normalized: dict[str, dict[str, float]] = {provider: {} for provider in providers}
    for name in FEATURE_NAMES:
        cohort = [(provider, averaged[provider].get(name, 0.0)) for provider in providers]
        for provider, value in normalize_cohort(cohort):
            normalized[provider][name] = value

    assembled: dict[str, AssembledInput] = {}
    for provider in providers:
        mission_vec = embeddings.mission(provider)
        cos = cosine_alignment(mission_vec, topic_vec)
        numeric = dict(normalized[provider])
        numeric["brand_mission_alignment"] = (cos + 1.0) / 2.0
        assembled[provider] = AssembledInput(
            mission_embedding=mission_vec,
            topic_embedding=topic_vec,
            numeric=NumericFeatures(numeric),
        )
    return assembled
