"""Minimal deterministic neural toolkit for the two rankers.

Everything is float64 numpy with hand-derived gradients; there is no
autograd. The listwise model is: one dense layer per feature group
(mission embedding, topic embedding, numeric block), concatenation,
single-head scaled dot-product self-attention across the slate, then a
two-layer scoring head. The pairwise baseline is a one-hidden-layer
scorer over the concatenated features.

Gradient derivations are verified against central finite differences by
:func:`grad_check`; coordinates whose perturbation flips a ReLU
activation pattern are skipped and reported.
"""

from __future__ import annotations

import base64
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .errors import DataError, TrainingError

DEFAULT_GROUP_DIM = 32
DEFAULT_HEAD_HIDDEN = 32
NUMERIC_DIM = 8

CHECKPOINT_FORMAT_VERSION = 1

# fn(params) -> (loss, grads by param name, relu activation signature)
LossFn = Callable[[dict[str, np.ndarray]], tuple[float, dict[str, np.ndarray], tuple]]


def check_finite(name: str, array: np.ndarray) -> np.ndarray:
    if not np.all(np.isfinite(array)):
        raise TrainingError(f"non-finite values in tensor {name!r}")
    return array


def softmax(x: np.ndarray, axis: int = -1) -> np.ndarray:
    """Numerically stable softmax; rows sum to 1."""
    shifted = x - np.max(x, axis=axis, keepdims=True)
    e = np.exp(shifted)
    return e / np.sum(e, axis=axis, keepdims=True)


def relu(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0.0)


# ---------------------------------------------------------------------------
# Layers
# ---------------------------------------------------------------------------


@dataclass
class DenseLayer:
    """xW + b, with ReLU when the layer is a hidden one."""

    W: np.ndarray
    b: np.ndarray
    hidden: bool = True

    def __post_init__(self):
        if self.W.ndim != 2 or self.b.shape != (self.W.shape[1],):
            raise ValueError(f"dense layer shapes inconsistent: W{self.W.shape}, b{self.b.shape}")


def dense_forward(x: np.ndarray, layer: DenseLayer) -> np.ndarray:
    if x.ndim != 2 or x.shape[1] != layer.W.shape[0]:
        raise ValueError(f"dense input {x.shape} does not match W {layer.W.shape}")
    z = x @ layer.W + layer.b
    return relu(z) if layer.hidden else z


@dataclass
class AttentionBlock:
    """Projection matrices of one self-attention head; all d x d."""

    Wq: np.ndarray
    Wk: np.ndarray
    Wv: np.ndarray

    def __post_init__(self):
        d = self.Wq.shape[0]
        for name, m in (("Wq", self.Wq), ("Wk", self.Wk), ("Wv", self.Wv)):
            if m.shape != (d, d):
                raise ValueError(f"attention {name} must be ({d}, {d}), got {m.shape}")

    @property
    def dim(self) -> int:
        return self.Wq.shape[0]


def self_attention(x: np.ndarray, block: AttentionBlock) -> np.ndarray:
    """softmax(Q K^T / sqrt(d)) V with Q=xWq, K=xWk, V=xWv.

    Tokens are the providers of one slate; the op is equivariant under
    row permutations of ``x``.
    """
    out, _ = _attention_forward(x, block)
    return out


def _attention_forward(x: np.ndarray, block: AttentionBlock) -> tuple[np.ndarray, dict]:
    if x.ndim != 2 or x.shape[1] != block.dim:
        raise ValueError(f"attention input {x.shape} does not match dim {block.dim}")
    q = x @ block.Wq
    k = x @ block.Wk
    v = x @ block.Wv
    scale = 1.0 / math.sqrt(block.dim)
    weights = softmax((q @ k.T) * scale)
    out = weights @ v
    cache = {"x": x, "q": q, "k": k, "v": v, "weights": weights, "scale": scale}
    return out, cache


def _attention_backward(d_out: np.ndarray, block: AttentionBlock, cache: dict) -> tuple[np.ndarray, dict[str, np.ndarray]]:
    """Gradients of attention output wrt input rows and the three projections."""
    x, q, k, v = cache["x"], cache["q"], cache["k"], cache["v"]
    weights, scale = cache["weights"], cache["scale"]
    d_weights = d_out @ v.T
    d_v = weights.T @ d_out
    # softmax rows: dP = A * (dA - sum(dA * A, row))
    d_scores = weights * (d_weights - np.sum(d_weights * weights, axis=-1, keepdims=True))
    d_q = (d_scores @ k) * scale
    d_k = (d_scores.T @ q) * scale
    grads = {"Wq": x.T @ d_q, "Wk": x.T @ d_k, "Wv": x.T @ d_v}
    d_x = d_q @ block.Wq.T + d_k @ block.Wk.T + d_v @ block.Wv.T
    return d_x, grads


# ---------------------------------------------------------------------------
# Losses
# ---------------------------------------------------------------------------


def listnet_target(relevance: np.ndarray, temperature: float = 1.0) -> np.ndarray:
    """Top-one target distribution from graded relevance.

    Grades are divided by the slate maximum before the softmax so that
    large grade ranges do not collapse the target to one-hot. The
    temperature divides the scaled grades again: below 1 it sharpens the
    target toward the top grades, above 1 it flattens. An all-zero slate
    targets the uniform distribution.
    """
    if temperature <= 0.0:
        raise ValueError(f"temperature must be positive, got {temperature}")
    relevance = np.asarray(relevance, dtype=np.float64)
    top = float(np.max(relevance))
    if top <= 0.0:
        return np.full(relevance.shape, 1.0 / relevance.size)
    return softmax(relevance / (top * temperature))


def listnet_loss(
    scores: np.ndarray, relevance: np.ndarray, temperature: float = 1.0
) -> tuple[float, np.ndarray]:
    """Cross-entropy between target and score softmax, with its gradient.

    Returns (loss, dloss/dscores); the gradient is q - p and sums to 0.
    """
    scores = np.asarray(scores, dtype=np.float64)
    relevance = np.asarray(relevance, dtype=np.float64)
    if scores.shape != relevance.shape or scores.ndim != 1 or scores.size < 2:
        raise ValueError(f"need matching 1-d arrays of size >= 2, got {scores.shape} and {relevance.shape}")
    p = listnet_target(relevance, temperature)
    shifted = scores - np.max(scores)
    lse = math.log(np.sum(np.exp(shifted))) + float(np.max(scores))
    loss = lse - float(np.dot(p, scores))
    grad = softmax(scores) - p
    return loss, grad


def _stable_sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def pairwise_logistic_terms(margins: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-pair loss log(1 + exp(-m)) and dloss/dm for margins m = s_i - s_j."""
    margins = np.asarray(margins, dtype=np.float64)
    losses = np.where(
        margins >= 0,
        np.log1p(np.exp(-np.clip(margins, 0, None))),
        -margins + np.log1p(np.exp(np.clip(margins, None, 0))),
    )
    d_margin = -_stable_sigmoid(-margins)
    return losses, d_margin


def pairwise_logistic_loss(s_i: float, s_j: float) -> tuple[float, tuple[float, float]]:
    """Logistic loss for the preference i over j, with analytic gradients.

    loss = log(1 + exp(-(s_i - s_j))); returns (loss, (dloss/ds_i, dloss/ds_j)).
    """
    losses, d_margin = pairwise_logistic_terms(np.array([s_i - s_j]))
    g = float(d_margin[0])
    return float(losses[0]), (g, -g)


# ---------------------------------------------------------------------------
# Adam
# ---------------------------------------------------------------------------


@dataclass
class AdamState:
    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)
    t: int = 0

    @classmethod
    def for_params(cls, params: dict[str, np.ndarray]) -> "AdamState":
        return cls(
            m={k: np.zeros_like(a) for k, a in params.items()},
            v={k: np.zeros_like(a) for k, a in params.items()},
            t=0,
        )


def adam_step(
    params: dict[str, np.ndarray],
    grads: dict[str, np.ndarray],
    state: AdamState,
    lr: float = 1e-3,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
) -> tuple[dict[str, np.ndarray], AdamState]:
    """One bias-corrected Adam update; returns new params and state."""
    if set(params) != set(grads):
        raise TrainingError(f"gradient keys do not match parameters: {sorted(set(params) ^ set(grads))}")
    t = state.t + 1
    new_params: dict[str, np.ndarray] = {}
    new_m: dict[str, np.ndarray] = {}
    new_v: dict[str, np.ndarray] = {}
    for name in params:
        g = grads[name]
        if not np.all(np.isfinite(g)):
            raise TrainingError(f"non-finite gradient for tensor {name!r}")
        m = beta1 * state.m[name] + (1.0 - beta1) * g
        v = beta2 * state.v[name] + (1.0 - beta2) * g * g
        m_hat = m / (1.0 - beta1**t)
        v_hat = v / (1.0 - beta2**t)
        new_params[name] = params[name] - lr * m_hat / (np.sqrt(v_hat) + eps)
        new_m[name] = m
        new_v[name] = v
    return new_params, AdamState(m=new_m, v=new_v, t=t)


# ---------------------------------------------------------------------------
# Parameter initialization
# ---------------------------------------------------------------------------


def glorot_uniform(rng: np.random.Generator, fan_in: int, fan_out: int) -> np.ndarray:
    limit = math.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_in, fan_out))


# ---------------------------------------------------------------------------
# Listwise self-attention ranker
# ---------------------------------------------------------------------------


@dataclass
class ListwiseRanker:
    """Group dense layers -> concat -> self-attention -> scoring head."""

    embedding_dim: int
    group_dim: int = DEFAULT_GROUP_DIM
    head_hidden: int = DEFAULT_HEAD_HIDDEN
    params: dict[str, np.ndarray] = field(default_factory=dict)

    @property
    def concat_dim(self) -> int:
        return 3 * self.group_dim

    @classmethod
    def initialize(
        cls,
        embedding_dim: int,
        seed: int = 42,
        group_dim: int = DEFAULT_GROUP_DIM,
        head_hidden: int = DEFAULT_HEAD_HIDDEN,
    ) -> "ListwiseRanker":
        rng = np.random.default_rng(seed)
        g, h = group_dim, head_hidden
        d = 3 * g
        params = {
            "mission_dense.W": glorot_uniform(rng, embedding_dim, g),
            "mission_dense.b": np.zeros(g),
            "topic_dense.W": glorot_uniform(rng, embedding_dim, g),
            "topic_dense.b": np.zeros(g),
            "numeric_dense.W": glorot_uniform(rng, NUMERIC_DIM, g),
            "numeric_dense.b": np.zeros(g),
            "attention.Wq": glorot_uniform(rng, d, d),
            "attention.Wk": glorot_uniform(rng, d, d),
            "attention.Wv": glorot_uniform(rng, d, d),
            "head_hidden.W": glorot_uniform(rng, d, h),
            "head_hidden.b": np.zeros(h),
            "head_out.W": glorot_uniform(rng, h, 1),
            "head_out.b": np.zeros(1),
        }
        return cls(embedding_dim=embedding_dim, group_dim=g, head_hidden=h, params=params)

    def _check_inputs(self, mission: np.ndarray, topic: np.ndarray, numeric: np.ndarray):
        if mission.ndim != 2 or mission.shape[1] != self.embedding_dim:
            raise ValueError(f"mission block must be (S, {self.embedding_dim}), got {mission.shape}")
        if topic.shape != mission.shape:
            raise ValueError(f"topic block {topic.shape} does not match mission {mission.shape}")
        if numeric.shape != (mission.shape[0], NUMERIC_DIM):
            raise ValueError(f"numeric block must be ({mission.shape[0]}, {NUMERIC_DIM}), got {numeric.shape}")

    def _forward(self, mission, topic, numeric) -> tuple[np.ndarray, dict]:
        self._check_inputs(mission, topic, numeric)
        p = self.params
        z_m = mission @ p["mission_dense.W"] + p["mission_dense.b"]
        z_t = topic @ p["topic_dense.W"] + p["topic_dense.b"]
        z_n = numeric @ p["numeric_dense.W"] + p["numeric_dense.b"]
        h_m, h_t, h_n = relu(z_m), relu(z_t), relu(z_n)
        x = np.concatenate([h_m, h_t, h_n], axis=1)
        block = AttentionBlock(p["attention.Wq"], p["attention.Wk"], p["attention.Wv"])
        attended, attn_cache = _attention_forward(x, block)
        z_h = attended @ p["head_hidden.W"] + p["head_hidden.b"]
        h_h = relu(z_h)
        scores = (h_h @ p["head_out.W"] + p["head_out.b"]).ravel()
        cache = {
            "mission": mission,
            "topic": topic,
            "numeric": numeric,
            "z_m": z_m,
            "z_t": z_t,
            "z_n": z_n,
            "x": x,
            "block": block,
            "attn_cache": attn_cache,
            "attended": attended,
            "z_h": z_h,
            "h_h": h_h,
        }
        return scores, cache

    def forward(self, mission: np.ndarray, topic: np.ndarray, numeric: np.ndarray) -> np.ndarray:
        """Relevance scores for one slate; pure function of the inputs."""
        scores, _ = self._forward(mission, topic, numeric)
        return check_finite("scores", scores)

    def _backward(self, d_scores: np.ndarray, cache: dict) -> dict[str, np.ndarray]:
        p = self.params
        g = self.group_dim
        ds = d_scores.reshape(-1, 1)
        grads: dict[str, np.ndarray] = {}
        grads["head_out.W"] = cache["h_h"].T @ ds
        grads["head_out.b"] = ds.sum(axis=0)
        d_hh = ds @ p["head_out.W"].T
        d_zh = d_hh * (cache["z_h"] > 0)
        grads["head_hidden.W"] = cache["attended"].T @ d_zh
        grads["head_hidden.b"] = d_zh.sum(axis=0)
        d_attended = d_zh @ p["head_hidden.W"].T
        d_x, attn_grads = _attention_backward(d_attended, cache["block"], cache["attn_cache"])
        grads["attention.Wq"] = attn_grads["Wq"]
        grads["attention.Wk"] = attn_grads["Wk"]
        grads["attention.Wv"] = attn_grads["Wv"]
        d_hm, d_ht, d_hn = d_x[:, :g], d_x[:, g : 2 * g], d_x[:, 2 * g :]
        for prefix, d_h, z, inp in (
            ("mission_dense", d_hm, cache["z_m"], cache["mission"]),
            ("topic_dense", d_ht, cache["z_t"], cache["topic"]),
            ("numeric_dense", d_hn, cache["z_n"], cache["numeric"]),
        ):
            d_z = d_h * (z > 0)
            grads[f"{prefix}.W"] = inp.T @ d_z
            grads[f"{prefix}.b"] = d_z.sum(axis=0)
        return grads

    def _relu_signature(self, cache: dict) -> tuple:
        return (
            (cache["z_m"] > 0).tobytes(),
            (cache["z_t"] > 0).tobytes(),
            (cache["z_n"] > 0).tobytes(),
            (cache["z_h"] > 0).tobytes(),
        )

    def loss_and_grads(
        self,
        mission: np.ndarray,
        topic: np.ndarray,
        numeric: np.ndarray,
        relevance: np.ndarray,
        temperature: float = 1.0,
    ) -> tuple[float, dict[str, np.ndarray], tuple]:
        """ListNet loss on one slate plus gradients for every parameter.

        The third return value is the ReLU activation signature used by
        :func:`grad_check` to recognize kink crossings.
        """
        scores, cache = self._forward(mission, topic, numeric)
        loss, d_scores = listnet_loss(scores, relevance, temperature)
        grads = self._backward(d_scores, cache)
        return loss, grads, self._relu_signature(cache)

    def with_params(self, params: dict[str, np.ndarray]) -> "ListwiseRanker":
        return ListwiseRanker(
            embedding_dim=self.embedding_dim,
            group_dim=self.group_dim,
            head_hidden=self.head_hidden,
            params=params,
        )


# ---------------------------------------------------------------------------
# Pairwise baseline scorer
# ---------------------------------------------------------------------------


@dataclass
class PairwiseScorer:
    """One-hidden-layer scorer over concatenated per-item features."""

    embedding_dim: int
    hidden_dim: int = DEFAULT_HEAD_HIDDEN
    params: dict[str, np.ndarray] = field(default_factory=dict)

    @property
    def input_dim(self) -> int:
        return 2 * self.embedding_dim + NUMERIC_DIM

    @classmethod
    def initialize(cls, embedding_dim: int, seed: int = 42, hidden_dim: int = DEFAULT_HEAD_HIDDEN) -> "PairwiseScorer":
        rng = np.random.default_rng(seed)
        input_dim = 2 * embedding_dim + NUMERIC_DIM
        params = {
            "hidden.W": glorot_uniform(rng, input_dim, hidden_dim),
            "hidden.b": np.zeros(hidden_dim),
            "out.W": glorot_uniform(rng, hidden_dim, 1),
            "out.b": np.zeros(1),
        }
        return cls(embedding_dim=embedding_dim, hidden_dim=hidden_dim, params=params)

    def _forward(self, features: np.ndarray) -> tuple[np.ndarray, dict]:
        if features.ndim != 2 or features.shape[1] != self.input_dim:
            raise ValueError(f"features must be (n, {self.input_dim}), got {features.shape}")
        p = self.params
        z = features @ p["hidden.W"] + p["hidden.b"]
        h = relu(z)
        scores = (h @ p["out.W"] + p["out.b"]).ravel()
        return scores, {"features": features, "z": z, "h": h}

    def forward(self, features: np.ndarray) -> np.ndarray:
        scores, _ = self._forward(features)
        return check_finite("scores", scores)

    def loss_and_grads(
        self, features: np.ndarray, pairs: Sequence[tuple[int, int]]
    ) -> tuple[float, dict[str, np.ndarray], tuple]:
        """Mean pairwise logistic loss over (winner, loser) index pairs."""
        if not pairs:
            raise ValueError("need at least one preference pair")
        scores, cache = self._forward(features)
        winners = np.array([i for i, _ in pairs])
        losers = np.array([j for _, j in pairs])
        margins = scores[winners] - scores[losers]
        losses, d_margin = pairwise_logistic_terms(margins)
        loss = float(np.mean(losses))
        d_scores = np.zeros_like(scores)
        np.add.at(d_scores, winners, d_margin / len(pairs))
        np.add.at(d_scores, losers, -d_margin / len(pairs))
        ds = d_scores.reshape(-1, 1)
        p = self.params
        grads = {
            "out.W": cache["h"].T @ ds,
            "out.b": ds.sum(axis=0),
        }
        d_h = ds @ p["out.W"].T
        d_z = d_h * (cache["z"] > 0)
        grads["hidden.W"] = cache["features"].T @ d_z
        grads["hidden.b"] = d_z.sum(axis=0)
        return loss, grads, ((cache["z"] > 0).tobytes(),)

    def with_params(self, params: dict[str, np.ndarray]) -> "PairwiseScorer":
        return PairwiseScorer(embedding_dim=self.embedding_dim, hidden_dim=self.hidden_dim, params=params)


# ---------------------------------------------------------------------------
# Gradient checking
# ---------------------------------------------------------------------------


@dataclass
class GradCheckResult:
    max_rel_err: float
    checked: int
    skipped: list[tuple[str, int]] = field(default_factory=list)


def grad_check(
    fn: LossFn,
    params: dict[str, np.ndarray],
    h: float = 1e-4,
    n_coords: int = 50,
    rng: np.random.Generator | None = None,
) -> GradCheckResult:
    """Compare analytic gradients against central finite differences.

    Samples up to ``n_coords`` parameter coordinates. A coordinate whose
    +-h perturbation changes the ReLU activation signature sits on a
    kink and is skipped (reported in the result). The relative error is
    |analytic - numeric| / max(|analytic|, |numeric|, 1), i.e. absolute
    below unit scale.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    base_loss, base_grads, base_sig = fn(params)
    coords: list[tuple[str, int]] = []
    for name in sorted(params):
        coords.extend((name, i) for i in range(params[name].size))
    if len(coords) > n_coords:
        idx = rng.choice(len(coords), size=n_coords, replace=False)
        coords = [coords[i] for i in sorted(idx)]

    max_err = 0.0
    checked = 0
    skipped: list[tuple[str, int]] = []
    for name, flat in coords:
        bumped = {k: v.copy() for k, v in params.items()}
        bumped[name].flat[flat] += h
        loss_plus, _, sig_plus = fn(bumped)
        bumped[name].flat[flat] -= 2 * h
        loss_minus, _, sig_minus = fn(bumped)
        if sig_plus != base_sig or sig_minus != base_sig:
            skipped.append((name, flat))
            continue
        numeric = (loss_plus - loss_minus) / (2 * h)
        analytic = float(base_grads[name].flat[flat])
        err = abs(analytic - numeric) / max(abs(analytic), abs(numeric), 1.0)
        max_err = max(max_err, err)
        checked += 1
    return GradCheckResult(max_rel_err=max_err, checked=checked, skipped=skipped)


# ---------------------------------------------------------------------------
# Checkpoints
# ---------------------------------------------------------------------------


@dataclass
class ModelCheckpoint:
    """Versioned container for hyperparameters, weights, and run metadata."""

    hyperparameters: dict
    parameters: dict[str, np.ndarray]
    metadata: dict = field(default_factory=dict)
    format_version: int = CHECKPOINT_FORMAT_VERSION

    def build_model(self) -> ListwiseRanker | PairwiseScorer:
        kind = self.hyperparameters.get("model")
        if kind == "listwise":
            return ListwiseRanker(
                embedding_dim=int(self.hyperparameters["embedding_dim"]),
                group_dim=int(self.hyperparameters["group_dim"]),
                head_hidden=int(self.hyperparameters["head_hidden"]),
                params=self.parameters,
            )
        if kind == "pairwise":
            return PairwiseScorer(
                embedding_dim=int(self.hyperparameters["embedding_dim"]),
                hidden_dim=int(self.hyperparameters["hidden_dim"]),
                params=self.parameters,
            )
        raise DataError(f"checkpoint has unknown model kind {kind!r}")


def _encode_array(array: np.ndarray) -> dict:
    data = np.ascontiguousarray(array, dtype="<f8")
    return {
        "shape": list(array.shape),
        "dtype": "<f8",
        "data_b64": base64.b64encode(data.tobytes()).decode("ascii"),
    }


def _decode_array(obj: dict) -> np.ndarray:
    raw = base64.b64decode(obj["data_b64"])
    array = np.frombuffer(raw, dtype=obj["dtype"]).reshape(obj["shape"])
    return array.astype(np.float64, copy=True)


def save_checkpoint(checkpoint: ModelCheckpoint, path: str | Path) -> None:
    """Serialize to a JSON container with base64 little-endian float64 arrays.

    The encoding is exact, so a reloaded model's forward pass is
    bit-identical to the pre-save one.
    """
    payload = {
        "format_version": checkpoint.format_version,
        "hyperparameters": checkpoint.hyperparameters,
        "metadata": checkpoint.metadata,
        "parameters": {name: _encode_array(checkpoint.parameters[name]) for name in sorted(checkpoint.parameters)},
    }
    Path(path).write_text(json.dumps(payload, separators=(",", ":"), ensure_ascii=False) + "\n", encoding="utf-8")


def load_checkpoint(path: str | Path) -> ModelCheckpoint:
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise DataError(f"cannot open checkpoint: {exc.strerror}", path=str(path)) from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"checkpoint is not valid JSON: {exc.msg}", path=str(path)) from None
    version = payload.get("format_version")
    if version != CHECKPOINT_FORMAT_VERSION:
        raise DataError(f"unsupported checkpoint format version {version!r}", path=str(path))
    try:
        parameters = {name: _decode_array(obj) for name, obj in payload["parameters"].items()}
        return ModelCheckpoint(
            hyperparameters=payload["hyperparameters"],
            parameters=parameters,
            metadata=payload.get("metadata", {}),
            format_version=version,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"malformed checkpoint: {exc}", path=str(path)) from None
