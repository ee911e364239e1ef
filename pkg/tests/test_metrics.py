"""Metric correctness against independent brute-force references.

The reference implementations here are deliberately written in a
different style from the library (explicit loops, fractions where
possible) so a shared bug cannot hide in both.
"""

import itertools
import math
import random

import pytest

from ptrank.errors import DataError
from ptrank.metrics import (
    dcg_at_k,
    has_signal,
    kendall_tau,
    mean_ndcg_at_k,
    ndcg_at_k,
    set_precision_recall,
)


def ref_dcg(rels, k):
    # log base conversion instead of log2, as an independent code path
    total = 0.0
    for position, rel in enumerate(rels[:k], start=1):
        gain = 2.0**rel - 1.0
        total += gain * math.log(2.0) / math.log(position + 1.0)
    return total


def ref_ndcg(rels, k):
    ideal = ref_dcg(sorted(rels, reverse=True), k)
    if ideal == 0.0:
        return 0.0
    return ref_dcg(rels, k) / ideal


def ref_kendall(a, b):
    # counts over explicit pair enumeration
    pos = {x: i for i, x in enumerate(b)}
    n = len(a)
    if n < 2:
        return 1.0
    diff = 0
    for x, y in itertools.combinations(a, 2):
        if pos[x] > pos[y]:
            diff += 1
    pairs = n * (n - 1) // 2
    return (pairs - 2 * diff) / pairs


# ---------------------------------------------------------------------------
# DCG / NDCG
# ---------------------------------------------------------------------------


def test_dcg_hand_computed():
    # (2^3-1)/log2(2) + (2^2-1)/log2(3) + (2^1-1)/log2(4)
    expected = 7.0 + 3.0 / math.log2(3.0) + 1.0 / 2.0
    assert dcg_at_k([3, 2, 1], 3) == pytest.approx(expected, abs=1e-15)


def test_ndcg_descending_is_ideal():
    assert ndcg_at_k([3, 2, 1], 3) == 1.0
    assert ndcg_at_k([5, 4, 3, 2, 1], 10) == 1.0


def test_ndcg_reversed_order():
    value = ndcg_at_k([1, 2, 3], 3)
    assert value == pytest.approx(ref_ndcg([1, 2, 3], 3), abs=1e-12)
    assert 0.0 < value < 1.0


def test_ndcg_truncates_at_k():
    # items past position k contribute nothing
    assert dcg_at_k([3, 2, 1, 9, 9], 3) == dcg_at_k([3, 2, 1], 3)


def test_ndcg_all_zero_is_zero():
    assert ndcg_at_k([0, 0, 0], 3) == 0.0
    assert not has_signal([0, 0, 0])
    assert has_signal([0, 1, 0])


def test_dcg_rejects_bad_inputs():
    with pytest.raises(DataError):
        dcg_at_k([1, 2], 0)
    with pytest.raises(DataError):
        dcg_at_k([1, -1], 2)


def test_ndcg_matches_bruteforce_on_random_slates():
    rng = random.Random(20240401)
    for _ in range(300):
        n = rng.randint(1, 8)
        rels = [rng.randint(0, 5) for _ in range(n)]
        k = rng.randint(1, 10)
        assert ndcg_at_k(rels, k) == pytest.approx(ref_ndcg(rels, k), abs=1e-12)


def test_mean_ndcg_excludes_and_counts_zero_slates():
    report = mean_ndcg_at_k([[3, 2, 1], [0, 0, 0], [1, 2, 3]], k=3)
    assert report.slate_count == 2
    assert report.skipped == 1
    expected = (1.0 + ref_ndcg([1, 2, 3], 3)) / 2
    assert report.value == pytest.approx(expected, abs=1e-12)


def test_mean_ndcg_empty_input():
    report = mean_ndcg_at_k([], k=5)
    assert report.value == 0.0
    assert report.slate_count == 0


# ---------------------------------------------------------------------------
# Kendall tau
# ---------------------------------------------------------------------------


def test_kendall_identical_and_reversed():
    ids = ["a", "b", "c", "d"]
    assert kendall_tau(ids, ids) == 1.0
    assert kendall_tau(ids, ids[::-1]) == -1.0


def test_kendall_single_swap_of_three():
    # one discordant pair out of three
    assert kendall_tau(["a", "b", "c"], ["a", "c", "b"]) == pytest.approx(1.0 / 3.0, abs=1e-15)


def test_kendall_trivial_rankings():
    assert kendall_tau([], []) == 1.0
    assert kendall_tau(["x"], ["x"]) == 1.0


def test_kendall_matches_bruteforce_on_random_permutations():
    rng = random.Random(7)
    for _ in range(300):
        n = rng.randint(2, 8)
        ids = [f"i{j}" for j in range(n)]
        a = ids[:]
        b = ids[:]
        rng.shuffle(a)
        rng.shuffle(b)
        assert kendall_tau(a, b) == pytest.approx(ref_kendall(a, b), abs=1e-12)


def test_kendall_rejects_mismatched_or_repeated_ids():
    with pytest.raises(DataError):
        kendall_tau(["a", "b"], ["a", "c"])
    with pytest.raises(DataError):
        kendall_tau(["a", "a"], ["a", "a"])


# ---------------------------------------------------------------------------
# Set precision / recall
# ---------------------------------------------------------------------------


def test_precision_recall_two_of_three():
    precision, recall = set_precision_recall({"A", "B", "C"}, {"A", "B", "D"})
    assert precision == pytest.approx(2.0 / 3.0, abs=1e-15)
    assert recall == pytest.approx(2.0 / 3.0, abs=1e-15)


def test_precision_recall_edge_cases():
    precision, recall = set_precision_recall(set(), {"A"})
    assert (precision, recall) == (0.0, 0.0)
    precision, recall = set_precision_recall({"A"}, {"A"})
    assert (precision, recall) == (1.0, 1.0)
    with pytest.raises(DataError):
        set_precision_recall({"A"}, set())
