"""Deterministic RNG derivation.

Every random choice in the pipeline flows from one user-facing seed.
Sub-streams are derived by hashing the seed together with a stable
purpose string, so adding or reordering pipeline stages never perturbs
the streams of unrelated stages.
"""

from __future__ import annotations

import hashlib

import numpy as np


def child_seed(seed: int, *context: str) -> int:
    """A 64-bit seed derived from (seed, context) via SHA-256."""
    payload = "|".join([str(int(seed)), *context]).encode("utf-8")
    digest = hashlib.sha256(payload).digest()
    return int.from_bytes(digest[:8], "little")


def derived_rng(seed: int, *context: str) -> np.random.Generator:
    """A generator seeded from :func:`child_seed`."""
    return np.random.default_rng(child_seed(seed, *context))


def stable_fraction(*context: str) -> float:
    """Deterministic hash of the context strings into [0, 1).

    Used for seed-independent-but-stable partitioning such as the
    validation split, which must not move between runs or machines.
    """
    payload = "|".join(context).encode("utf-8")
    digest = hashlib.sha256(payload).digest()
    return int.from_bytes(digest[:8], "little") / 2**64
