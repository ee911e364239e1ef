"""Batch learning-to-rank engine for content providers.

Ranks providers per (topic, locale) by combining weak-supervised linear
scoring, a human/LLM ground-truth pipeline, and a listwise
self-attention neural ranker, then exports a per-content multiplicative
signal.
"""

from .catalog import (
    FEATURE_NAMES,
    ContentItem,
    EmbeddingRecord,
    FeatureSnapshot,
    Judgment,
    Locale,
    SlateExample,
    SlateItem,
)
from .config import PipelineConfig, load_config
from .errors import (
    ConfigError,
    DataError,
    LabelParseError,
    LabelTransportError,
    PtrankError,
    TrainingError,
)
from .features import AssembledInput, EmbeddingIndex, NumericFeatures, assemble_inputs
from .metrics import dcg_at_k, kendall_tau, mean_ndcg_at_k, ndcg_at_k, set_precision_recall
from .nn import (
    ListwiseRanker,
    ModelCheckpoint,
    PairwiseScorer,
    grad_check,
    listnet_loss,
    load_checkpoint,
    pairwise_logistic_loss,
    save_checkpoint,
)
from .signal import PxTSignal, SignalTable, build_signal_table, compose_multiplicative, content_pxt
from .training import (
    SlateTensors,
    TrainingConfig,
    TrainingResult,
    build_slates,
    evaluate_model,
    grade_labeled_slates,
    predict_slate,
    prepare_dataset,
    synthesize,
    train,
)
from .truth import (
    AgreementReport,
    CandidateSet,
    LabelResponse,
    agreement,
    assign_relevance,
    consensus_vote,
    sample_candidates,
)
from .weak import RankedSlate, WeightProfile, rank_topic, score_linear

__version__ = "0.1.0"

__all__ = [
    "AgreementReport",
    "AssembledInput",
    "CandidateSet",
    "ConfigError",
    "ContentItem",
    "DataError",
    "EmbeddingIndex",
    "EmbeddingRecord",
    "FEATURE_NAMES",
    "FeatureSnapshot",
    "Judgment",
    "LabelParseError",
    "LabelResponse",
    "LabelTransportError",
    "ListwiseRanker",
    "Locale",
    "ModelCheckpoint",
    "NumericFeatures",
    "PairwiseScorer",
    "PipelineConfig",
    "PtrankError",
    "PxTSignal",
    "RankedSlate",
    "SignalTable",
    "SlateExample",
    "SlateItem",
    "SlateTensors",
    "TrainingConfig",
    "TrainingError",
    "TrainingResult",
    "WeightProfile",
    "agreement",
    "assemble_inputs",
    "assign_relevance",
    "build_signal_table",
    "build_slates",
    "compose_multiplicative",
    "consensus_vote",
    "content_pxt",
    "dcg_at_k",
    "evaluate_model",
    "grad_check",
    "grade_labeled_slates",
    "kendall_tau",
    "listnet_loss",
    "load_checkpoint",
    "load_config",
    "mean_ndcg_at_k",
    "ndcg_at_k",
    "pairwise_logistic_loss",
    "predict_slate",
    "prepare_dataset",
    "rank_topic",
    "sample_candidates",
    "save_checkpoint",
    "score_linear",
    "set_precision_recall",
    "synthesize",
    "train",
]
