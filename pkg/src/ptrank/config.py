"""Plain-text configuration shared by every pipeline command.

The format is one ``key = value`` per line, ``#`` comments, blank lines
ignored. Every key has a default, every command-line flag overrides its
key, and the canonical rendering of the effective config is hashed into
each run manifest.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from pathlib import Path

from .errors import ConfigError
from .training import TrainingConfig


def _parse_bool(raw: str) -> bool:
    lowered = raw.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def _parse_optional_int(raw: str):
    if raw.strip().lower() in ("", "none", "auto"):
        return None
    return int(raw)


@dataclass(frozen=True)
class PipelineConfig:
    """Effective settings for one command invocation."""

    seed: int = 42
    decay: float = 0.8
    window_days: int = 7
    embedding_dim: int | None = None  # None: infer from the embeddings file
    slate_capacity: int = 30
    model: str = "listwise"
    epochs: int = 15
    batch_size: int = 64
    learning_rate: float = 1e-3
    negative_sampling: bool = True
    validation_fraction: float = 0.2
    ndcg_k: int = 10
    max_pairs_per_slate: int = 200
    listnet_temperature: float = 1.0
    group_dim: int = 32
    head_hidden: int = 32
    floor: float = 0.1
    n_negatives: int = 10
    quorum_agree: int = 2
    quorum_total: int = 3
    parallelism: int = 1

    def __post_init__(self):
        if self.parallelism < 1:
            raise ConfigError(f"parallelism must be >= 1, got {self.parallelism}")
        if self.embedding_dim is not None and self.embedding_dim < 1:
            raise ConfigError(f"embedding_dim must be >= 1, got {self.embedding_dim}")
        if not 1 <= self.quorum_agree <= self.quorum_total:
            raise ConfigError(
                f"quorum must satisfy 1 <= agree <= total, got ({self.quorum_agree}, {self.quorum_total})"
            )

    def training(self) -> TrainingConfig:
        """The TrainingConfig slice of these settings (validates them)."""
        return TrainingConfig(
            model=self.model,
            epochs=self.epochs,
            batch_size=self.batch_size,
            slate_capacity=self.slate_capacity,
            learning_rate=self.learning_rate,
            negative_sampling=self.negative_sampling,
            validation_fraction=self.validation_fraction,
            ndcg_k=self.ndcg_k,
            max_pairs_per_slate=self.max_pairs_per_slate,
            listnet_temperature=self.listnet_temperature,
            seed=self.seed,
            group_dim=self.group_dim,
            head_hidden=self.head_hidden,
        )

    def render(self) -> str:
        """Canonical text form: sorted keys, repr-exact values."""
        lines = []
        for f in sorted(fields(self), key=lambda f: f.name):
            value = getattr(self, f.name)
            text = "none" if value is None else (str(value).lower() if isinstance(value, bool) else str(value))
            lines.append(f"{f.name} = {text}")
        return "\n".join(lines) + "\n"


_PARSERS = {
    "seed": int,
    "decay": float,
    "window_days": int,
    "embedding_dim": _parse_optional_int,
    "slate_capacity": int,
    "model": str,
    "epochs": int,
    "batch_size": int,
    "learning_rate": float,
    "negative_sampling": _parse_bool,
    "validation_fraction": float,
    "ndcg_k": int,
    "max_pairs_per_slate": int,
    "listnet_temperature": float,
    "group_dim": int,
    "head_hidden": int,
    "floor": float,
    "n_negatives": int,
    "quorum_agree": int,
    "quorum_total": int,
    "parallelism": int,
}


def parse_config_text(text: str, source: str = "<config>") -> dict:
    """Parse key = value lines into typed values; unknown keys are errors."""
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in _PARSERS:
            raise ConfigError(f"{source}:{lineno}: unknown config key {key!r}")
        if key in values:
            raise ConfigError(f"{source}:{lineno}: duplicate config key {key!r}")
        try:
            values[key] = _PARSERS[key](value.strip())
        except ValueError as exc:
            raise ConfigError(f"{source}:{lineno}: bad value for {key!r}: {exc}") from None
    return values


def load_config(path: str | Path | None = None, overrides: dict | None = None) -> PipelineConfig:
    """Defaults, then the config file, then explicit overrides."""
    values: dict = {}
    if path is not None:
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
        values.update(parse_config_text(text, source=str(path)))
    config = PipelineConfig(**values)
    if overrides:
        unknown = set(overrides) - {f.name for f in fields(PipelineConfig)}
        if unknown:
            raise ConfigError(f"unknown config override(s): {sorted(unknown)}")
        config = replace(config, **overrides)
    return config
