"""Domain records and their on-disk JSONL representation.

All tabular artifacts are JSON Lines: one object per line, canonical key
order, shortest-round-trip float formatting. Serializing the same records
twice therefore yields byte-identical files, and write followed by load is
the identity on content.

Formats (one JSON object per line):

* snapshots.jsonl   ``{"provider","topic","locale","date","values":{...}}``
* embeddings.jsonl  ``{"subject_id","kind","vector":[...]}``
* judgments.jsonl   ``{"topic","locale","provider","annotator","selected"}``
* slates.jsonl      ``{"topic","locale","items":[{"provider","relevance"}]}``
* content.jsonl     ``{"content_id","provider","locale","topics":[{"topic","confidence"}]}``
"""

from __future__ import annotations

import datetime as _dt
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from .errors import DataError

# Canonical numeric feature names; also the canonical serialization order.
FEATURE_NAMES: tuple[str, ...] = (
    "popularity",
    "brand_mission_alignment",
    "eligible_article_count_7d",
    "high_quality_doc_ratio",
    "provider_doc_ratio",
    "click_dwell_time",
    "ctr",
    "user_feedback",
)

# Features whose raw values must stay within [0, 1].
UNIT_INTERVAL_FEATURES = ("high_quality_doc_ratio", "provider_doc_ratio", "ctr")
# Features whose raw values must be non-negative integers.
COUNT_FEATURES = ("eligible_article_count_7d",)

EMBEDDING_KINDS = ("provider_mission", "topic_definition")

DEFAULT_EMBEDDING_DIM = 1536


def _require_id(value: str, what: str) -> str:
    if not isinstance(value, str) or not value.strip():
        raise DataError(f"{what} must be a non-empty string, got {value!r}")
    return value


@dataclass(frozen=True, order=True)
class Locale:
    """A (language, region) market pair, rendered as e.g. ``en-US``."""

    language: str
    region: str

    def __post_init__(self):
        if not self.language or not self.language.isascii() or not self.language.isalpha() or not self.language.islower():
            raise DataError(f"locale language must be lowercase letters, got {self.language!r}")
        if not self.region or not self.region.isascii() or not self.region.isalnum() or self.region != self.region.upper():
            raise DataError(f"locale region must be uppercase letters/digits, got {self.region!r}")

    @classmethod
    def parse(cls, text: str) -> "Locale":
        if not isinstance(text, str) or text.count("-") != 1:
            raise DataError(f"locale must look like 'en-US', got {text!r}")
        language, region = text.split("-")
        return cls(language, region)

    def __str__(self) -> str:
        return f"{self.language}-{self.region}"


@dataclass(frozen=True)
class FeatureSnapshot:
    """One day's raw feature values for a (provider, topic, locale) cell.

    The constructor rejects unknown feature keys and non-finite values;
    range rules (ctr and ratios in [0, 1], integer counts) are reported by
    :func:`validate_catalog` rather than raised, so that a catalog audit
    can list every offending row.
    """

    provider: str
    topic: str
    locale: Locale
    date: _dt.date
    values: dict[str, float] = field(compare=False)

    def __post_init__(self):
        _require_id(self.provider, "provider id")
        _require_id(self.topic, "topic id")
        if not isinstance(self.date, _dt.date):
            raise DataError(f"snapshot date must be a calendar day, got {self.date!r}")
        unknown = set(self.values) - set(FEATURE_NAMES)
        if unknown:
            raise DataError(f"unknown feature key(s) {sorted(unknown)}")
        for name, value in self.values.items():
            if not isinstance(value, (int, float)) or isinstance(value, bool) or not math.isfinite(value):
                raise DataError(f"feature {name!r} must be a finite number, got {value!r}")

    def range_violations(self) -> list[str]:
        """Range rules from the catalog contract, as human-readable strings."""
        problems = []
        for name in FEATURE_NAMES:
            if name not in self.values:
                problems.append(f"missing feature key {name!r}")
        for name, value in sorted(self.values.items()):
            if value < 0:
                problems.append(f"feature {name!r} is negative ({value!r})")
            if name in UNIT_INTERVAL_FEATURES and not 0.0 <= value <= 1.0:
                problems.append(f"feature {name!r} outside [0,1] ({value!r})")
            if name in COUNT_FEATURES and float(value) != int(value):
                problems.append(f"feature {name!r} must be an integer count ({value!r})")
        return problems

    def key(self) -> tuple[str, str, str, str]:
        return (self.provider, self.topic, str(self.locale), self.date.isoformat())


@dataclass(frozen=True)
class EmbeddingRecord:
    """Fixed-width vector for a provider mission or a topic definition."""

    subject_id: str
    kind: str
    vector: tuple[float, ...]

    def __post_init__(self):
        _require_id(self.subject_id, "subject id")
        if self.kind not in EMBEDDING_KINDS:
            raise DataError(f"embedding kind must be one of {EMBEDDING_KINDS}, got {self.kind!r}")
        if not self.vector:
            raise DataError("embedding vector is empty")
        for x in self.vector:
            if not math.isfinite(x):
                raise DataError(f"embedding for {self.subject_id!r} has non-finite entry")

    @property
    def dim(self) -> int:
        return len(self.vector)

    def is_zero(self) -> bool:
        return all(x == 0.0 for x in self.vector)


@dataclass(frozen=True)
class Judgment:
    """One annotator's yes/no call for a provider under a (topic, locale)."""

    topic: str
    locale: Locale
    provider: str
    annotator: str
    selected: bool

    def __post_init__(self):
        _require_id(self.topic, "topic id")
        _require_id(self.provider, "provider id")
        _require_id(self.annotator, "annotator")


@dataclass(frozen=True)
class SlateItem:
    provider: str
    relevance: int

    def __post_init__(self):
        _require_id(self.provider, "provider id")
        if not isinstance(self.relevance, int) or isinstance(self.relevance, bool) or self.relevance < 0:
            raise DataError(f"relevance must be an integer >= 0, got {self.relevance!r}")


@dataclass(frozen=True)
class SlateExample:
    """One topic's labeled provider list; the unit of listwise training."""

    topic: str
    locale: Locale
    items: tuple[SlateItem, ...]

    def __post_init__(self):
        _require_id(self.topic, "topic id")
        if not self.items:
            raise DataError(f"slate for topic {self.topic!r} is empty")
        providers = [item.provider for item in self.items]
        if len(set(providers)) != len(providers):
            raise DataError(f"slate for topic {self.topic!r} has duplicate providers")

    def relevance_of(self, provider: str) -> int:
        for item in self.items:
            if item.provider == provider:
                return item.relevance
        raise KeyError(provider)


@dataclass(frozen=True)
class ContentItem:
    """A piece of content with its provider and scored topics."""

    content_id: str
    provider: str
    locale: Locale
    topics: tuple[tuple[str, float], ...]

    def __post_init__(self):
        _require_id(self.content_id, "content id")
        _require_id(self.provider, "provider id")
        if not self.topics:
            raise DataError(f"content {self.content_id!r} has no topics")
        for topic, confidence in self.topics:
            _require_id(topic, "topic id")
            if not math.isfinite(confidence) or not 0.0 <= confidence <= 1.0:
                raise DataError(
                    f"content {self.content_id!r} topic {topic!r} confidence {confidence!r} outside [0,1]"
                )


# ---------------------------------------------------------------------------
# JSONL plumbing
# ---------------------------------------------------------------------------


def _dumps(obj: dict) -> str:
    # Canonical: insertion-ordered keys, compact separators, repr floats.
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=False)


def read_jsonl(path: str | Path) -> Iterator[tuple[int, dict]]:
    """Yield (line_number, parsed_object) for each non-empty line."""
    path = Path(path)
    try:
        handle = path.open("r", encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot open {path}: {exc.strerror}", path=str(path)) from exc
    with handle:
        for lineno, raw in enumerate(handle, start=1):
            if not raw.strip():
                continue
            try:
                obj = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise DataError(f"malformed JSON: {exc.msg}", path=str(path), line=lineno) from exc
            if not isinstance(obj, dict):
                raise DataError("expected a JSON object", path=str(path), line=lineno)
            yield lineno, obj


def write_jsonl(path: str | Path, rows: Iterable[dict]) -> int:
    """Write dict rows as canonical JSONL; returns the number written."""
    path = Path(path)
    count = 0
    try:
        with path.open("w", encoding="utf-8", newline="\n") as handle:
            for row in rows:
                handle.write(_dumps(row))
                handle.write("\n")
                count += 1
    except OSError as exc:
        raise DataError(f"cannot write {path}: {exc.strerror}", path=str(path)) from exc
    return count


def _get(obj: dict, key: str, path: str, lineno: int):
    if key not in obj:
        raise DataError(f"missing field {key!r}", path=path, line=lineno)
    return obj[key]


def _wrap_record_error(exc: DataError, path: str, lineno: int) -> DataError:
    return DataError(str(exc), path=path, line=lineno)


# -- per-kind converters ----------------------------------------------------


def snapshot_to_record(s: FeatureSnapshot) -> dict:
    values = {k: float(s.values[k]) for k in FEATURE_NAMES if k in s.values}
    return {
        "provider": s.provider,
        "topic": s.topic,
        "locale": str(s.locale),
        "date": s.date.isoformat(),
        "values": values,
    }


def snapshot_from_record(obj: dict, path: str = "<memory>", lineno: int = 0) -> FeatureSnapshot:
    try:
        raw_values = _get(obj, "values", path, lineno)
        if not isinstance(raw_values, dict):
            raise DataError("'values' must be an object", path=path, line=lineno)
        return FeatureSnapshot(
            provider=_get(obj, "provider", path, lineno),
            topic=_get(obj, "topic", path, lineno),
            locale=Locale.parse(_get(obj, "locale", path, lineno)),
            date=_dt.date.fromisoformat(_get(obj, "date", path, lineno)),
            values={k: float(v) for k, v in raw_values.items()},
        )
    except DataError as exc:
        raise _wrap_record_error(exc, path, lineno) from None
    except (TypeError, ValueError) as exc:
        raise DataError(f"bad snapshot record: {exc}", path=path, line=lineno) from None


def embedding_to_record(e: EmbeddingRecord) -> dict:
    return {"subject_id": e.subject_id, "kind": e.kind, "vector": [float(x) for x in e.vector]}


def embedding_from_record(obj: dict, path: str = "<memory>", lineno: int = 0, dim: int | None = None) -> EmbeddingRecord:
    try:
        vector = _get(obj, "vector", path, lineno)
        if not isinstance(vector, list):
            raise DataError("'vector' must be an array", path=path, line=lineno)
        record = EmbeddingRecord(
            subject_id=_get(obj, "subject_id", path, lineno),
            kind=_get(obj, "kind", path, lineno),
            vector=tuple(float(x) for x in vector),
        )
    except DataError as exc:
        raise _wrap_record_error(exc, path, lineno) from None
    except (TypeError, ValueError) as exc:
        raise DataError(f"bad embedding record: {exc}", path=path, line=lineno) from None
    if dim is not None and record.dim != dim:
        raise DataError(
            f"embedding for {record.subject_id!r} has length {record.dim}, expected {dim}",
            path=path,
            line=lineno,
        )
    return record


def judgment_to_record(j: Judgment) -> dict:
    return {
        "topic": j.topic,
        "locale": str(j.locale),
        "provider": j.provider,
        "annotator": j.annotator,
        "selected": bool(j.selected),
    }


def judgment_from_record(obj: dict, path: str = "<memory>", lineno: int = 0) -> Judgment:
    try:
        selected = _get(obj, "selected", path, lineno)
        if not isinstance(selected, bool):
            raise DataError("'selected' must be a boolean", path=path, line=lineno)
        return Judgment(
            topic=_get(obj, "topic", path, lineno),
            locale=Locale.parse(_get(obj, "locale", path, lineno)),
            provider=_get(obj, "provider", path, lineno),
            annotator=_get(obj, "annotator", path, lineno),
            selected=selected,
        )
    except DataError as exc:
        raise _wrap_record_error(exc, path, lineno) from None


def slate_to_record(s: SlateExample) -> dict:
    return {
        "topic": s.topic,
        "locale": str(s.locale),
        "items": [{"provider": it.provider, "relevance": int(it.relevance)} for it in s.items],
    }


def slate_from_record(obj: dict, path: str = "<memory>", lineno: int = 0) -> SlateExample:
    try:
        items = _get(obj, "items", path, lineno)
        if not isinstance(items, list):
            raise DataError("'items' must be an array", path=path, line=lineno)
        parsed = tuple(
            SlateItem(provider=_get(it, "provider", path, lineno), relevance=_get(it, "relevance", path, lineno))
            for it in items
        )
        return SlateExample(
            topic=_get(obj, "topic", path, lineno),
            locale=Locale.parse(_get(obj, "locale", path, lineno)),
            items=parsed,
        )
    except DataError as exc:
        raise _wrap_record_error(exc, path, lineno) from None


def content_to_record(c: ContentItem) -> dict:
    return {
        "content_id": c.content_id,
        "provider": c.provider,
        "locale": str(c.locale),
        "topics": [{"topic": t, "confidence": float(conf)} for t, conf in c.topics],
    }


def content_from_record(obj: dict, path: str = "<memory>", lineno: int = 0) -> ContentItem:
    try:
        topics = _get(obj, "topics", path, lineno)
        if not isinstance(topics, list):
            raise DataError("'topics' must be an array", path=path, line=lineno)
        parsed = tuple(
            (_get(t, "topic", path, lineno), float(_get(t, "confidence", path, lineno))) for t in topics
        )
        return ContentItem(
            content_id=_get(obj, "content_id", path, lineno),
            provider=_get(obj, "provider", path, lineno),
            locale=Locale.parse(_get(obj, "locale", path, lineno)),
            topics=parsed,
        )
    except DataError as exc:
        raise _wrap_record_error(exc, path, lineno) from None


_LOADERS = {
    "snapshot": snapshot_from_record,
    "judgment": judgment_from_record,
    "slate": slate_from_record,
    "content": content_from_record,
}

_WRITERS = {
    FeatureSnapshot: snapshot_to_record,
    EmbeddingRecord: embedding_to_record,
    Judgment: judgment_to_record,
    SlateExample: slate_to_record,
    ContentItem: content_to_record,
}


def load_records(path: str | Path, kind: str, dim: int | None = None):
    """Yield typed records from a JSONL file.

    ``kind`` is one of ``snapshot``, ``embedding``, ``judgment``, ``slate``,
    ``content``. For embeddings an expected vector length may be supplied;
    mismatches raise a :class:`DataError` citing the offending line.
    """
    if kind == "embedding":
        for lineno, obj in read_jsonl(path):
            yield embedding_from_record(obj, str(path), lineno, dim=dim)
        return
    if kind not in _LOADERS:
        raise ValueError(f"unknown record kind {kind!r}")
    loader = _LOADERS[kind]
    for lineno, obj in read_jsonl(path):
        yield loader(obj, str(path), lineno)


def write_records(path: str | Path, records: Iterable) -> int:
    """Write typed records (all of one supported kind) as canonical JSONL."""

    def rows():
        for record in records:
            writer = _WRITERS.get(type(record))
            if writer is None:
                raise ValueError(f"cannot serialize record of type {type(record).__name__}")
            yield writer(record)

    return write_jsonl(path, rows())


# ---------------------------------------------------------------------------
# Catalog validation
# ---------------------------------------------------------------------------


@dataclass
class CatalogReport:
    """Counts plus the sorted list of invariant violations."""

    snapshot_count: int = 0
    embedding_count: int = 0
    provider_count: int = 0
    topic_count: int = 0
    locale_count: int = 0
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "snapshot_count": self.snapshot_count,
            "embedding_count": self.embedding_count,
            "provider_count": self.provider_count,
            "topic_count": self.topic_count,
            "locale_count": self.locale_count,
            "violations": list(self.violations),
        }

    def summary(self) -> str:
        status = "OK" if self.ok else f"{len(self.violations)} violation(s)"
        return (
            f"snapshots={self.snapshot_count} embeddings={self.embedding_count} "
            f"providers={self.provider_count} topics={self.topic_count} "
            f"locales={self.locale_count} [{status}]"
        )


def validate_catalog(
    snapshots: Iterable[FeatureSnapshot],
    embeddings: Iterable[EmbeddingRecord],
    embedding_dim: int | None = None,
) -> CatalogReport:
    """Audit streams of records against the catalog invariants.

    Flags missing feature keys, out-of-range values, duplicate
    (provider, topic, locale, date) rows, wrong embedding lengths, and
    all-zero embedding vectors. When ``embedding_dim`` is not given, the
    first embedding's length is the expected width. The report is
    deterministic for the same content regardless of input order.
    """
    report = CatalogReport()
    providers: set[str] = set()
    topics: set[str] = set()
    locales: set[str] = set()
    seen: dict[tuple, int] = {}
    violations: list[str] = []

    for snap in snapshots:
        report.snapshot_count += 1
        providers.add(snap.provider)
        topics.add(snap.topic)
        locales.add(str(snap.locale))
        row = f"snapshot({snap.provider},{snap.topic},{snap.locale},{snap.date.isoformat()})"
        for problem in snap.range_violations():
            violations.append(f"{row}: {problem}")
        seen[snap.key()] = seen.get(snap.key(), 0) + 1

    for key, count in seen.items():
        if count > 1:
            violations.append(f"snapshot({','.join(key)}): duplicate row appears {count} times")

    expected_dim = embedding_dim
    for emb in embeddings:
        report.embedding_count += 1
        if expected_dim is None:
            expected_dim = emb.dim
        row = f"embedding({emb.subject_id},{emb.kind})"
        if emb.dim != expected_dim:
            violations.append(f"{row}: vector length {emb.dim}, expected {expected_dim}")
        if emb.is_zero():
            violations.append(f"{row}: vector is all zeros")

    report.provider_count = len(providers)
    report.topic_count = len(topics)
    report.locale_count = len(locales)
    report.violations = sorted(violations)
    return report
