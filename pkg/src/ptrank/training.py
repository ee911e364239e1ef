"""Slate assembly, the two trainers, prediction, and synthetic corpora.

A training example is one (topic, locale) slate: per-provider embeddings
and numeric features plus graded relevance. The listwise trainer
minimizes the ListNet loss over whole slates; the pairwise baseline
minimizes logistic loss over preference pairs drawn from the same
grades. Both use Adam and share the validation split, which partitions
topics (never items) so no topic leaks across the split.
"""

from __future__ import annotations

import datetime as _dt
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .catalog import (
    FEATURE_NAMES,
    ContentItem,
    EmbeddingRecord,
    FeatureSnapshot,
    Judgment,
    Locale,
    SlateExample,
)
from .errors import ConfigError, DataError, TrainingError
from .features import (
    DEFAULT_DECAY,
    DEFAULT_WINDOW_DAYS,
    AssembledInput,
    EmbeddingIndex,
    assemble_inputs,
)
from .metrics import DEFAULT_K, MetricReport, kendall_tau, mean_ndcg_at_k, ndcg_at_k, has_signal
from .nn import (
    DEFAULT_GROUP_DIM,
    DEFAULT_HEAD_HIDDEN,
    AdamState,
    ListwiseRanker,
    ModelCheckpoint,
    PairwiseScorer,
    adam_step,
    check_finite,
)
from .seeding import child_seed, derived_rng, stable_fraction
from .truth import CandidateSet, LabelResponse, assign_relevance
from .weak import RankedSlate

MODEL_KINDS = ("listwise", "pairwise")


@dataclass(frozen=True)
class TrainingConfig:
    """Knobs of one training run; defaults match the shipped pipeline."""

    model: str = "listwise"
    epochs: int = 15
    batch_size: int = 64
    slate_capacity: int = 30
    learning_rate: float = 1e-3
    negative_sampling: bool = True
    validation_fraction: float = 0.2
    ndcg_k: int = DEFAULT_K
    max_pairs_per_slate: int = 200
    listnet_temperature: float = 1.0
    seed: int = 42
    group_dim: int = DEFAULT_GROUP_DIM
    head_hidden: int = DEFAULT_HEAD_HIDDEN

    def __post_init__(self):
        if self.model not in MODEL_KINDS:
            raise ConfigError(f"model must be one of {MODEL_KINDS}, got {self.model!r}")
        if self.epochs < 1:
            raise ConfigError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.slate_capacity < 2:
            raise ConfigError(f"slate_capacity must be >= 2, got {self.slate_capacity}")
        if not self.learning_rate > 0:
            raise ConfigError(f"learning_rate must be > 0, got {self.learning_rate!r}")
        if not 0.0 <= self.validation_fraction < 1.0:
            raise ConfigError(f"validation_fraction must be in [0, 1), got {self.validation_fraction!r}")
        if self.ndcg_k < 1:
            raise ConfigError(f"ndcg_k must be >= 1, got {self.ndcg_k}")
        if self.max_pairs_per_slate < 1:
            raise ConfigError(f"max_pairs_per_slate must be >= 1, got {self.max_pairs_per_slate}")
        if not self.listnet_temperature > 0:
            raise ConfigError(f"listnet_temperature must be > 0, got {self.listnet_temperature!r}")


# ---------------------------------------------------------------------------
# Slate tensors
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SlateTensors:
    """One slate as aligned float64 arrays, row i belonging to providers[i]."""

    topic: str
    locale: Locale
    providers: tuple[str, ...]
    mission: np.ndarray
    topic_vec: np.ndarray
    numeric: np.ndarray
    relevance: np.ndarray

    def __post_init__(self):
        s = len(self.providers)
        if self.mission.shape[0] != s or self.topic_vec.shape != self.mission.shape:
            raise DataError(f"slate {self.topic!r}: embedding blocks do not align with providers")
        if self.numeric.shape != (s, 8) or self.relevance.shape != (s,):
            raise DataError(f"slate {self.topic!r}: numeric or relevance block misshaped")

    @property
    def size(self) -> int:
        return len(self.providers)

    @property
    def embedding_dim(self) -> int:
        return self.mission.shape[1]

    def pairwise_features(self) -> np.ndarray:
        return np.concatenate([self.mission, self.topic_vec, self.numeric], axis=1)


def tensors_for_providers(
    topic: str,
    locale: Locale,
    providers: Sequence[str],
    assembled: Mapping[str, AssembledInput],
    relevance: Sequence[int] | None = None,
) -> SlateTensors:
    """Stack assembled inputs for the given providers, in the given order."""
    missing = [p for p in providers if p not in assembled]
    if missing:
        raise DataError(f"no assembled features for provider(s) {missing[:5]} in ({topic}, {locale})")
    rows = [assembled[p] for p in providers]
    rel = np.zeros(len(rows)) if relevance is None else np.asarray(relevance, dtype=np.float64)
    return SlateTensors(
        topic=topic,
        locale=locale,
        providers=tuple(providers),
        mission=np.stack([r.mission_embedding for r in rows]),
        topic_vec=np.stack([r.topic_embedding for r in rows]),
        numeric=np.stack([r.numeric.as_array() for r in rows]),
        relevance=rel,
    )


def assemble_cells(
    slates: Sequence[SlateExample],
    snapshots: Sequence[FeatureSnapshot],
    embeddings: EmbeddingIndex,
    decay: float = DEFAULT_DECAY,
    window_days: int = DEFAULT_WINDOW_DAYS,
    as_of: _dt.date | None = None,
) -> dict[tuple[str, str], dict[str, AssembledInput]]:
    """Assembled inputs per (topic, locale) cell appearing in the slates."""
    by_cell: dict[tuple[str, str], list[FeatureSnapshot]] = {}
    for snap in snapshots:
        by_cell.setdefault((snap.topic, str(snap.locale)), []).append(snap)
    assembled: dict[tuple[str, str], dict[str, AssembledInput]] = {}
    for slate in slates:
        cell = (slate.topic, str(slate.locale))
        if cell in assembled:
            continue
        assembled[cell] = assemble_inputs(
            slate.topic, slate.locale, by_cell.get(cell, []), embeddings, decay, window_days, as_of
        )
    return assembled


def grade_labeled_slates(
    labels: Iterable[LabelResponse],
    candidate_sets: Iterable[CandidateSet],
    slate_capacity: int = 30,
) -> list[SlateExample]:
    """Grade accepted label responses into training slates.

    Each response is matched with its cell's candidate set, whose
    negatives become the zero-relevance rows. Output is sorted by
    (topic, locale) so the artifact is independent of input order.
    """
    by_cell: dict[tuple[str, str], CandidateSet] = {}
    for cand in candidate_sets:
        cell = (cand.topic, str(cand.locale))
        if cell in by_cell:
            raise DataError(f"duplicate candidate set for cell {cell}")
        by_cell[cell] = cand
    slates = []
    seen: set[tuple[str, str]] = set()
    for label in labels:
        cell = (label.topic, str(label.locale))
        if cell in seen:
            raise DataError(f"duplicate label response for cell {cell}")
        seen.add(cell)
        if cell not in by_cell:
            raise DataError(f"label response for cell {cell} has no candidate set")
        slates.append(assign_relevance(label, by_cell[cell].negatives, slate_capacity))
    slates.sort(key=lambda s: (s.topic, str(s.locale)))
    return slates


def build_slates(
    slates: Sequence[SlateExample],
    assembled_by_cell: Mapping[tuple[str, str], Mapping[str, AssembledInput]],
    negative_sampling: bool = True,
    seed: int = 42,
    slate_capacity: int = 30,
) -> tuple[list[SlateTensors], list[str]]:
    """Join graded slates with assembled features into model-ready tensors.

    Items without an assembled input are dropped and flagged. With
    ``negative_sampling`` off only graded (relevance > 0) items are kept.
    Oversized slates keep their first ``slate_capacity`` items. Slates
    left with fewer than 2 items are skipped and flagged. The ``seed`` is
    part of the signature for reproducibility bookkeeping; the current
    policies are all deterministic and never consult it.
    """
    del seed
    out: list[SlateTensors] = []
    flags: list[str] = []
    for slate in slates:
        cell = (slate.topic, str(slate.locale))
        name = f"({slate.topic}, {slate.locale})"
        assembled = assembled_by_cell.get(cell, {})
        items = []
        for item in slate.items:
            if item.provider not in assembled:
                flags.append(f"slate {name}: dropped {item.provider} (no assembled features)")
                continue
            items.append(item)
        if not negative_sampling:
            items = [item for item in items if item.relevance > 0]
        if len(items) > slate_capacity:
            flags.append(f"slate {name}: truncated {len(items)} items to capacity {slate_capacity}")
            items = items[:slate_capacity]
        if len(items) < 2:
            flags.append(f"slate {name}: skipped ({len(items)} usable item(s))")
            continue
        out.append(
            tensors_for_providers(
                slate.topic,
                slate.locale,
                [item.provider for item in items],
                assembled,
                [item.relevance for item in items],
            )
        )
    return out, flags


def prepare_dataset(
    slates: Sequence[SlateExample],
    snapshots: Sequence[FeatureSnapshot],
    embeddings: EmbeddingIndex,
    decay: float = DEFAULT_DECAY,
    window_days: int = DEFAULT_WINDOW_DAYS,
    as_of: _dt.date | None = None,
) -> list[SlateTensors]:
    """Assemble features and join every slate, negatives included.

    Convenience path for evaluation and prediction; raises if any slate
    cannot be fully joined instead of flagging.
    """
    assembled = assemble_cells(slates, snapshots, embeddings, decay, window_days, as_of)
    dataset = []
    for slate in slates:
        cell = (slate.topic, str(slate.locale))
        if not assembled.get(cell):
            raise DataError(f"no snapshots for slate cell ({slate.topic}, {slate.locale})")
        dataset.append(
            tensors_for_providers(
                slate.topic,
                slate.locale,
                [item.provider for item in slate.items],
                assembled[cell],
                [item.relevance for item in slate.items],
            )
        )
    return dataset


# ---------------------------------------------------------------------------
# Validation split
# ---------------------------------------------------------------------------


def split_slates(
    slates: Sequence[SlateExample], validation_fraction: float, seed: int
) -> tuple[list[SlateExample], list[SlateExample]]:
    """Partition whole slates into train/validation by hashing cell keys.

    Cells are ordered by a stable hash of (seed, topic, locale) and the
    lowest rounded fraction become validation, so the proportion is exact,
    no topic spans both folds, and the assignment is identical for every
    model trained under the same seed.
    """
    ordered = sorted(
        slates, key=lambda s: (stable_fraction(str(seed), "validation-split", s.topic, str(s.locale)), s.topic)
    )
    n_val = int(round(validation_fraction * len(ordered)))
    if validation_fraction > 0 and ordered:
        n_val = min(len(ordered) - 1, max(1, n_val))
    val = ordered[:n_val]
    train = ordered[n_val:]
    train.sort(key=lambda s: (s.topic, str(s.locale)))
    val.sort(key=lambda s: (s.topic, str(s.locale)))
    return train, val


def preference_pairs(relevance: np.ndarray, max_pairs: int, rng: np.random.Generator) -> list[tuple[int, int]]:
    """All (winner, loser) index pairs with a strict grade gap, capped.

    When the full set exceeds ``max_pairs`` a uniform subsample is drawn;
    the subsample is sorted so pair order stays deterministic.
    """
    pairs = [
        (i, j)
        for i in range(len(relevance))
        for j in range(len(relevance))
        if relevance[i] > relevance[j]
    ]
    if len(pairs) > max_pairs:
        idx = rng.choice(len(pairs), size=max_pairs, replace=False)
        pairs = [pairs[i] for i in sorted(idx)]
    return pairs


# ---------------------------------------------------------------------------
# Training
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EpochTrace:
    epoch: int
    train_loss: float
    val_ndcg: float


@dataclass
class TrainingResult:
    config: TrainingConfig
    model: ListwiseRanker | PairwiseScorer
    traces: list[EpochTrace]
    train_slates: int
    val_slates: int
    val_report: MetricReport
    flags: list[str] = field(default_factory=list)

    def to_checkpoint(self, metadata: dict | None = None) -> ModelCheckpoint:
        if isinstance(self.model, ListwiseRanker):
            hyper = {
                "model": "listwise",
                "embedding_dim": self.model.embedding_dim,
                "group_dim": self.model.group_dim,
                "head_hidden": self.model.head_hidden,
            }
        else:
            hyper = {
                "model": "pairwise",
                "embedding_dim": self.model.embedding_dim,
                "hidden_dim": self.model.hidden_dim,
            }
        meta = {
            "seed": self.config.seed,
            "epochs": self.config.epochs,
            "negative_sampling": self.config.negative_sampling,
            "train_slates": self.train_slates,
            "val_slates": self.val_slates,
            "val_ndcg": self.val_report.value,
        }
        if metadata:
            meta.update(metadata)
        return ModelCheckpoint(hyperparameters=hyper, parameters=self.model.params, metadata=meta)


def score_slate(model: ListwiseRanker | PairwiseScorer, st: SlateTensors) -> np.ndarray:
    if isinstance(model, ListwiseRanker):
        return model.forward(st.mission, st.topic_vec, st.numeric)
    return model.forward(st.pairwise_features())


@dataclass(frozen=True)
class SlateEvaluation:
    topic: str
    locale: Locale
    size: int
    ndcg: float
    tau: float

    def to_row(self) -> dict:
        return {
            "topic": self.topic,
            "locale": str(self.locale),
            "items": self.size,
            "ndcg": self.ndcg,
            "tau": self.tau,
        }


def _evaluate_one(
    model: ListwiseRanker | PairwiseScorer, st: SlateTensors, k: int
) -> tuple[SlateEvaluation, list[float] | None]:
    scores = score_slate(model, st)
    order = sorted(range(st.size), key=lambda i: (-scores[i], st.providers[i]))
    ranked_rels = [float(st.relevance[i]) for i in order]
    ndcg = ndcg_at_k(ranked_rels, k)
    ref = sorted(range(st.size), key=lambda i: (-st.relevance[i], st.providers[i]))
    tau = kendall_tau([st.providers[i] for i in order], [st.providers[i] for i in ref])
    row = SlateEvaluation(topic=st.topic, locale=st.locale, size=st.size, ndcg=ndcg, tau=tau)
    return row, ranked_rels if has_signal(ranked_rels) else None


def evaluate_model(
    model: ListwiseRanker | PairwiseScorer,
    dataset: Sequence[SlateTensors],
    k: int = DEFAULT_K,
    parallelism: int = 1,
) -> tuple[MetricReport, list[SlateEvaluation]]:
    """NDCG@k (mean over graded slates) plus per-slate NDCG and Kendall tau.

    Tau compares the predicted ordering with the grade ordering; ties on
    either side are broken by provider id so both orderings are total.
    Slates are independent, so ``parallelism`` > 1 fans them out over
    threads; results are collected in input order either way.
    """
    if parallelism > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            results = list(pool.map(lambda st: _evaluate_one(model, st, k), dataset))
    else:
        results = [_evaluate_one(model, st, k) for st in dataset]
    rows = [row for row, _ in results]
    graded = [rels for _, rels in results if rels is not None]
    report = mean_ndcg_at_k(graded, k)
    return report, rows


def _init_model(config: TrainingConfig, embedding_dim: int) -> ListwiseRanker | PairwiseScorer:
    init_seed = child_seed(config.seed, "init", config.model)
    if config.model == "listwise":
        return ListwiseRanker.initialize(
            embedding_dim, seed=init_seed, group_dim=config.group_dim, head_hidden=config.head_hidden
        )
    return PairwiseScorer.initialize(embedding_dim, seed=init_seed, hidden_dim=config.head_hidden)


def train(
    slates: Sequence[SlateExample],
    assembled_by_cell: Mapping[tuple[str, str], Mapping[str, AssembledInput]],
    config: TrainingConfig,
) -> TrainingResult:
    """Fit the configured model; returns the model, traces, and val metrics.

    Slates are split by topic before tensor building, and the
    negative_sampling switch applies to the training fold only: the
    validation fold always keeps its zero-relevance items, so validation
    NDCG stays comparable across the switch. Bit-for-bit deterministic
    for fixed inputs and config: initialization, epoch shuffles, and pair
    subsampling all derive from the one seed.
    """
    slates = list(slates)
    if not slates:
        raise TrainingError("no slates to train on")
    train_fold, val_fold = split_slates(slates, config.validation_fraction, config.seed)
    train_set, flags = build_slates(
        train_fold, assembled_by_cell, config.negative_sampling, config.seed, config.slate_capacity
    )
    val_set, val_flags = build_slates(val_fold, assembled_by_cell, True, config.seed, config.slate_capacity)
    flags.extend(val_flags)
    if not train_set:
        raise TrainingError("training split is empty")
    dims = {st.embedding_dim for st in train_set + val_set}
    if len(dims) != 1:
        raise DataError(f"mixed embedding widths in dataset: {sorted(dims)}")
    embedding_dim = dims.pop()

    model = _init_model(config, embedding_dim)
    params = model.params
    state = AdamState.for_params(params)

    pairs: list[list[tuple[int, int]]] = []
    if config.model == "pairwise":
        for st in train_set:
            rng = derived_rng(config.seed, "pairs", st.topic, str(st.locale))
            pairs.append(preference_pairs(st.relevance, config.max_pairs_per_slate, rng))

    traces = []
    for epoch in range(1, config.epochs + 1):
        order = derived_rng(config.seed, "epoch-order", str(epoch)).permutation(len(train_set))
        epoch_losses = []
        for start in range(0, len(order), config.batch_size):
            batch = order[start : start + config.batch_size]
            grad_sum: dict[str, np.ndarray] | None = None
            for idx in batch:
                st = train_set[idx]
                model.params = params
                if config.model == "listwise":
                    loss, grads, _ = model.loss_and_grads(
                        st.mission, st.topic_vec, st.numeric, st.relevance,
                        temperature=config.listnet_temperature,
                    )
                else:
                    slate_pairs = pairs[idx]
                    if not slate_pairs:
                        continue
                    loss, grads, _ = model.loss_and_grads(st.pairwise_features(), slate_pairs)
                if not math.isfinite(loss):
                    raise TrainingError(f"loss diverged on slate ({st.topic}, {st.locale})")
                epoch_losses.append(loss)
                if grad_sum is None:
                    grad_sum = {k: g.copy() for k, g in grads.items()}
                else:
                    for k, g in grads.items():
                        grad_sum[k] += g
            if grad_sum is None:
                continue
            n = len(batch)
            grad_mean = {k: g / n for k, g in grad_sum.items()}
            params, state = adam_step(params, grad_mean, state, lr=config.learning_rate)
        model.params = params
        for name, tensor in params.items():
            check_finite(name, tensor)
        if val_set:
            val_report, _ = evaluate_model(model, val_set, config.ndcg_k)
            val_ndcg = val_report.value
        else:
            val_ndcg = 0.0
        train_loss = math.fsum(epoch_losses) / len(epoch_losses) if epoch_losses else 0.0
        traces.append(EpochTrace(epoch=epoch, train_loss=train_loss, val_ndcg=val_ndcg))

    if val_set:
        val_report, _ = evaluate_model(model, val_set, config.ndcg_k)
    else:
        val_report = MetricReport(name="ndcg", k=config.ndcg_k, value=0.0, slate_count=0, skipped=0)
    return TrainingResult(
        config=config,
        model=model,
        traces=traces,
        train_slates=len(train_set),
        val_slates=len(val_set),
        val_report=val_report,
        flags=flags,
    )


def predict_slate(
    model: ListwiseRanker | PairwiseScorer,
    topic: str,
    locale: Locale,
    assembled: Mapping[str, AssembledInput],
) -> RankedSlate:
    """Score every assembled provider and return the ranked slate."""
    providers = sorted(assembled)
    if not providers:
        raise DataError(f"nothing to predict for cell ({topic}, {locale})")
    st = tensors_for_providers(topic, locale, providers, assembled)
    scores = score_slate(model, st)
    entries = sorted(zip(providers, scores.tolist()), key=lambda e: (-e[1], e[0]))
    return RankedSlate(topic=topic, locale=locale, entries=tuple(entries))


# ---------------------------------------------------------------------------
# Synthetic corpus
# ---------------------------------------------------------------------------

# Utility planted in the synthetic world. Engagement is graded on a
# curve: each feature contributes its percentile within the slate, not
# its absolute level, so a provider's standing depends on who else is in
# the slate. Alignment instead gates: providers clearing the gate get a
# constant bonus larger than the whole engagement range. Alignment never
# orders providers within a band, so models that only ever see eligible
# providers have nothing to learn about it.
PLANTED_UTILITY_WEIGHTS: dict[str, float] = {
    "popularity": 0.35,
    "brand_mission_alignment": 0.0,
    "eligible_article_count_7d": 0.05,
    "high_quality_doc_ratio": 0.15,
    "provider_doc_ratio": 0.1,
    "click_dwell_time": 0.1,
    "ctr": 0.15,
    "user_feedback": 0.1,
}
PLANTED_ALIGNMENT_GATE = 0.5
PLANTED_GATE_BONUS = 6.0

SYNTH_BASE_DATE = _dt.date(2024, 1, 1)
# One vertical per this many topics; topics in a vertical share a roster.
TOPICS_PER_VERTICAL = 20
# How far a topic definition drifts from its vertical center.
TOPIC_JITTER = 0.18


@dataclass
class SyntheticData:
    """A complete in-memory corpus plus the oracle slates it implies."""

    snapshots: list[FeatureSnapshot] = field(default_factory=list)
    embeddings: list[EmbeddingRecord] = field(default_factory=list)
    judgments: list[Judgment] = field(default_factory=list)
    candidates: list[CandidateSet] = field(default_factory=list)
    labels: list[LabelResponse] = field(default_factory=list)
    content: list[ContentItem] = field(default_factory=list)
    slates: list[SlateExample] = field(default_factory=list)


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def planted_utility(numeric_rows: np.ndarray) -> np.ndarray:
    """The synthetic world's true utilities for one slate's feature rows.

    Takes the (slate, feature) matrix of normalized numerics and returns
    one utility per row. Defined at slate level because engagement
    contributes through within-slate percentiles.
    """
    rows = np.atleast_2d(np.asarray(numeric_rows, dtype=np.float64))
    n = rows.shape[0]
    if n == 1:
        pct = np.full_like(rows, 0.5)
    else:
        order = np.argsort(np.argsort(rows, axis=0, kind="stable"), axis=0, kind="stable")
        pct = order / (n - 1)
    w = np.array([PLANTED_UTILITY_WEIGHTS[name] for name in FEATURE_NAMES])
    base = pct @ w
    align = rows[:, FEATURE_NAMES.index("brand_mission_alignment")]
    return base + np.where(align >= PLANTED_ALIGNMENT_GATE, PLANTED_GATE_BONUS, 0.0)


def synthesize(
    n_topics: int = 20,
    n_providers: int = 30,
    embedding_dim: int = 64,
    seed: int = 42,
    n_days: int = DEFAULT_WINDOW_DAYS,
    locales: Sequence[Locale] | None = None,
    extra_providers: int = 15,
) -> SyntheticData:
    """Generate a coherent corpus with a known best ranking per cell.

    Topics are grouped into verticals that share a provider universe, so
    the same providers recur across many (topic, locale) cells with
    fresh per-cell engagement numbers, the way real catalogs do. Each
    cell's candidate pool holds ``n_providers`` providers sampled from
    the vertical's roster, a third of them off-vertical: their missions
    are unrelated to the vertical (alignment near 0.5) while their
    engagement numbers skew high, so on engagement alone they look
    better than most on-vertical providers. On-vertical missions sit in
    a narrow alignment band, and the planted utility gates on alignment
    rather than scaling with it, so alignment never orders providers
    within a band; only the explicit negatives reveal that it gates
    them. Engagement itself is graded on a curve (within-slate
    percentiles), so a provider's true standing depends on the rest of
    the slate. Labels rank the top third of the pool; the bottom third
    are the explicit negatives. Roster providers left out of a cell
    still get snapshots there, giving samplers an eligible pool beyond
    the slate. Grades follow the planted utility of the assembled
    features, so the ideal ordering is known and every artifact (labels,
    candidates, judgments) is consistent with it.
    """
    if n_topics < 1 or n_providers < 6 or embedding_dim < 2 or n_days < 1:
        raise ConfigError("synthetic corpus needs n_topics >= 1, n_providers >= 6, dim >= 2, days >= 1")
    if not locales:
        locales = (Locale("en", "US"),)
    n_neg = max(1, n_providers // 3)
    n_pos = n_providers - n_neg
    n_rank = max(1, n_providers // 3)
    n_verticals = max(1, n_topics // TOPICS_PER_VERTICAL)
    on_size = n_pos + (extra_providers + 1) // 2
    off_size = n_neg + extra_providers // 2
    data = SyntheticData()

    centers: list[np.ndarray] = []
    rosters: list[list[str]] = []
    mission_records: list[list[EmbeddingRecord]] = []
    on_roster: dict[str, bool] = {}
    mission_by_provider: dict[str, np.ndarray] = {}
    vertical_topics: list[list[str]] = [[] for _ in range(n_verticals)]
    for v in range(n_verticals):
        rng = derived_rng(seed, "vertical", f"v{v:02d}")
        center = _unit(rng.standard_normal(embedding_dim))
        centers.append(center)
        roster: list[str] = []
        records: list[EmbeddingRecord] = []
        for i in range(on_size + off_size):
            provider = f"v{v:02d}p{i:02d}"
            aligned = i < on_size
            if aligned:
                c = rng.uniform(0.92, 0.96)
                g = rng.standard_normal(embedding_dim)
                ortho = g - (g @ center) * center
                mission = c * center + math.sqrt(1.0 - c * c) * _unit(ortho)
            else:
                mission = _unit(rng.standard_normal(embedding_dim))
            roster.append(provider)
            on_roster[provider] = aligned
            mission_by_provider[provider] = mission
            records.append(
                EmbeddingRecord(subject_id=provider, kind="provider_mission", vector=tuple(mission.tolist()))
            )
        rosters.append(roster)
        mission_records.append(records)
        data.embeddings.extend(records)

    for t in range(n_topics):
        topic = f"topic{t:03d}"
        v = t % n_verticals
        vertical_topics[v].append(topic)
        topic_rng = derived_rng(seed, "topic", topic)
        topic_vec = _unit(centers[v] + TOPIC_JITTER * _unit(topic_rng.standard_normal(embedding_dim)))
        topic_record = EmbeddingRecord(
            subject_id=topic, kind="topic_definition", vector=tuple(topic_vec.tolist())
        )
        data.embeddings.append(topic_record)
        index = EmbeddingIndex.from_records([topic_record, *mission_records[v]])

        roster = rosters[v]
        on_pool = [p for p in roster if on_roster[p]]
        off_pool = [p for p in roster if not on_roster[p]]
        for locale in locales:
            rng = derived_rng(seed, "synth", topic, str(locale))
            chosen_on = [on_pool[i] for i in sorted(rng.choice(len(on_pool), size=n_pos, replace=False).tolist())]
            chosen_off = [off_pool[i] for i in sorted(rng.choice(len(off_pool), size=n_neg, replace=False).tolist())]
            providers = chosen_on + chosen_off

            cell_snaps: list[FeatureSnapshot] = []
            for provider in roster:
                aligned = on_roster[provider]
                cosine = float(mission_by_provider[provider] @ topic_vec)
                # Off-vertical engagement draws skew into the top half,
                # so on engagement alone negatives look strong.
                skew = 0.0 if aligned else 0.5
                for d in range(n_days):
                    values = {
                        "popularity": rng.uniform(skew, 1.0),
                        "brand_mission_alignment": (cosine + 1.0) / 2.0,
                        "eligible_article_count_7d": float(rng.integers(0, 61)),
                        "high_quality_doc_ratio": rng.uniform(skew, 1.0),
                        "provider_doc_ratio": rng.uniform(0.0, 1.0),
                        "click_dwell_time": 5.0 + 115.0 * rng.uniform(skew, 1.0),
                        "ctr": rng.uniform(skew, 1.0),
                        "user_feedback": rng.uniform(skew, 1.0),
                    }
                    cell_snaps.append(
                        FeatureSnapshot(
                            provider=provider,
                            topic=topic,
                            locale=locale,
                            date=SYNTH_BASE_DATE + _dt.timedelta(days=d),
                            values=values,
                        )
                    )
            data.snapshots.extend(cell_snaps)

            assembled = assemble_inputs(topic, locale, cell_snaps, index)
            rows = np.stack([assembled[p].numeric.as_array() for p in providers])
            utility = dict(zip(providers, planted_utility(rows).tolist()))
            by_utility = sorted(providers, key=lambda p: (-utility[p], p))
            ranked = tuple(by_utility[:n_rank])
            negatives = tuple(by_utility[n_pos:])

            label = LabelResponse(topic=topic, locale=locale, ranked_providers=ranked, source="human_consensus")
            data.labels.append(label)
            data.candidates.append(
                CandidateSet(
                    topic=topic,
                    locale=locale,
                    positives=tuple(by_utility[:n_pos]),
                    negatives=negatives,
                    seed=child_seed(seed, "synth", topic, str(locale)),
                )
            )
            data.slates.append(assign_relevance(label, negatives, slate_capacity=n_providers))

            accepted = set(ranked)
            for provider in providers:
                truth = provider in accepted
                for annotator in ("ann1", "ann2", "ann3"):
                    vote = truth
                    if annotator == "ann3" and rng.uniform() < 0.1:
                        vote = not truth
                    data.judgments.append(
                        Judgment(topic=topic, locale=locale, provider=provider, annotator=annotator, selected=vote)
                    )

    for v, roster in enumerate(rosters):
        topics_here = vertical_topics[v]
        for provider in roster:
            rng = derived_rng(seed, "content", provider)
            for j in range(2 * len(locales)):
                primary = topics_here[int(rng.integers(0, len(topics_here)))]
                if on_roster[provider]:
                    primary_conf = rng.uniform(0.55, 0.95)
                else:
                    primary_conf = rng.uniform(0.3, 0.7)
                topics = [(primary, primary_conf)]
                if len(topics_here) > 1 and rng.uniform() < 0.3:
                    extra = primary
                    while extra == primary:
                        extra = topics_here[int(rng.integers(0, len(topics_here)))]
                    topics.append((extra, rng.uniform(0.1, primary_conf)))
                data.content.append(
                    ContentItem(
                        content_id=f"{provider}-c{j}",
                        provider=provider,
                        locale=locales[j % len(locales)],
                        topics=tuple(topics),
                    )
                )

    return data


def write_synthetic_dataset(data: SyntheticData, out_dir) -> dict[str, object]:
    """Write the corpus as the standard JSONL artifacts; returns paths."""
    from pathlib import Path

    from .catalog import write_jsonl, write_records

    out = Path(out_dir)
    paths = {
        "snapshots": out / "snapshots.jsonl",
        "embeddings": out / "embeddings.jsonl",
        "judgments": out / "judgments.jsonl",
        "candidates": out / "candidates.jsonl",
        "labels": out / "labels.jsonl",
        "content": out / "content.jsonl",
    }
    write_records(paths["snapshots"], data.snapshots)
    write_records(paths["embeddings"], data.embeddings)
    write_records(paths["judgments"], data.judgments)
    write_jsonl(paths["candidates"], (c.to_record() for c in data.candidates))
    write_jsonl(paths["labels"], (lab.to_record() for lab in data.labels))
    write_records(paths["content"], data.content)
    return paths
