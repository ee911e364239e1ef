"""Feature pipeline: recency averaging, normalization, assembly."""

import datetime as dt
import math

import numpy as np
import pytest

from ptrank.catalog import FEATURE_NAMES, EmbeddingRecord, Locale
from ptrank.errors import ConfigError, DataError
from ptrank.features import (
    EmbeddingIndex,
    NumericFeatures,
    assemble_inputs,
    cosine_alignment,
    normalize_cohort,
    recency_weighted_average,
)

from conftest import numeric, snapshot

D0 = dt.date(2024, 1, 1)


def day(n):
    return D0 + dt.timedelta(days=n)


# ---------------------------------------------------------------------------
# Recency weighting
# ---------------------------------------------------------------------------


def test_recency_average_hand_computed():
    # weights 1, 0.5, 0.25 for ages 0, 1, 2
    series = [(day(0), 1.0), (day(1), 2.0), (day(2), 4.0)]
    value = recency_weighted_average(series, decay=0.5, window_days=3, as_of=day(2))
    assert value == (4.0 * 1.0 + 2.0 * 0.5 + 1.0 * 0.25) / 1.75
    assert value == 3.0


def test_recency_average_defaults_to_latest_day():
    series = [(day(0), 1.0), (day(5), 3.0)]
    explicit = recency_weighted_average(series, decay=0.5, window_days=7, as_of=day(5))
    assert recency_weighted_average(series, decay=0.5, window_days=7) == explicit


def test_recency_average_window_excludes_old_days():
    series = [(day(0), 100.0), (day(9), 2.0)]
    assert recency_weighted_average(series, decay=0.9, window_days=7, as_of=day(9)) == 2.0


def test_recency_average_ignores_future_days():
    # observations after as_of do not contribute
    series = [(day(0), 2.0), (day(3), 50.0)]
    assert recency_weighted_average(series, decay=0.5, window_days=7, as_of=day(0)) == 2.0


def test_recency_average_duplicate_dates_keep_last():
    series = [(day(0), 1.0), (day(0), 9.0)]
    assert recency_weighted_average(series, as_of=day(0)) == 9.0


def test_recency_average_empty_series():
    assert recency_weighted_average([]) == 0.0
    assert recency_weighted_average([(day(0), 5.0)], window_days=3, as_of=day(9)) == 0.0


def test_recency_average_decay_one_is_plain_mean():
    series = [(day(0), 1.0), (day(1), 2.0), (day(2), 6.0)]
    assert recency_weighted_average(series, decay=1.0, window_days=7, as_of=day(2)) == 3.0


def test_recency_average_parameter_bounds():
    with pytest.raises(ConfigError):
        recency_weighted_average([], decay=0.0)
    with pytest.raises(ConfigError):
        recency_weighted_average([], decay=1.5)
    with pytest.raises(ConfigError):
        recency_weighted_average([], window_days=0)
    with pytest.raises(DataError):
        recency_weighted_average([(day(0), float("nan"))])


# ---------------------------------------------------------------------------
# Cohort normalization
# ---------------------------------------------------------------------------


def test_normalize_cohort_min_max():
    out = dict(normalize_cohort([("a", 0.0), ("b", 5.0), ("c", 10.0)]))
    assert out == {"a": 0.0, "b": 0.5, "c": 1.0}


def test_normalize_cohort_preserves_order_and_keys():
    cells = [("p3", 7.0), ("p1", 3.0), ("p2", 5.0)]
    out = normalize_cohort(cells)
    assert [k for k, _ in out] == ["p3", "p1", "p2"]
    values = dict(out)
    assert values["p1"] < values["p2"] < values["p3"]


def test_normalize_cohort_degenerate_maps_to_half():
    out = normalize_cohort([("a", 4.2), ("b", 4.2)])
    assert [v for _, v in out] == [0.5, 0.5]


def test_normalize_cohort_rejects_bad_input():
    with pytest.raises(DataError):
        normalize_cohort([])
    with pytest.raises(DataError):
        normalize_cohort([("a", float("inf"))])


# ---------------------------------------------------------------------------
# Alignment
# ---------------------------------------------------------------------------


def test_cosine_alignment_reference_directions():
    e1 = np.array([1.0, 0.0])
    e2 = np.array([0.0, 1.0])
    assert cosine_alignment(e1, e1) == 1.0
    assert cosine_alignment(e1, -e1) == -1.0
    assert cosine_alignment(e1, e2) == 0.0
    assert cosine_alignment(e1, np.array([3.0, 0.0])) == 1.0  # scale free


def test_cosine_alignment_errors():
    with pytest.raises(DataError):
        cosine_alignment(np.zeros(3), np.ones(3))
    with pytest.raises(DataError):
        cosine_alignment(np.ones(3), np.ones(4))


# ---------------------------------------------------------------------------
# NumericFeatures
# ---------------------------------------------------------------------------


def test_numeric_features_contract():
    feats = numeric(popularity=1.0)
    assert feats["popularity"] == 1.0
    array = feats.as_array()
    assert array.shape == (8,)
    assert array[FEATURE_NAMES.index("popularity")] == 1.0
    with pytest.raises(DataError):
        NumericFeatures({"popularity": 0.5})
    with pytest.raises(DataError):
        numeric(ctr=1.5)


# ---------------------------------------------------------------------------
# Assembly
# ---------------------------------------------------------------------------


@pytest.fixture
def small_world():
    loc = Locale("en", "US")
    snaps = []
    for provider, pop in (("pa", 1.0), ("pb", 0.25)):
        for d in range(2):
            snaps.append(snapshot(provider=provider, topic="t1", locale=loc, day=d, popularity=pop))
    # a snapshot from another cell that must be ignored
    snaps.append(snapshot(provider="pa", topic="t2", locale=loc, popularity=0.0))
    index = EmbeddingIndex.from_records(
        [
            EmbeddingRecord("pa", "provider_mission", (1.0, 0.0)),
            EmbeddingRecord("pb", "provider_mission", (0.0, 1.0)),
            EmbeddingRecord("t1", "topic_definition", (1.0, 0.0)),
            EmbeddingRecord("t2", "topic_definition", (0.0, 1.0)),
        ]
    )
    return loc, snaps, index


def test_assemble_inputs_normalizes_within_cohort(small_world):
    loc, snaps, index = small_world
    assembled = assemble_inputs("t1", loc, snaps, index)
    assert set(assembled) == {"pa", "pb"}
    assert assembled["pa"].numeric["popularity"] == 1.0
    assert assembled["pb"].numeric["popularity"] == 0.0
    for inp in assembled.values():
        for name in FEATURE_NAMES:
            assert 0.0 <= inp.numeric[name] <= 1.0


def test_assemble_inputs_alignment_from_embeddings(small_world):
    loc, snaps, index = small_world
    assembled = assemble_inputs("t1", loc, snaps, index)
    # pa is parallel to the topic, pb orthogonal
    assert assembled["pa"].numeric["brand_mission_alignment"] == 1.0
    assert assembled["pb"].numeric["brand_mission_alignment"] == 0.5
    assert np.array_equal(assembled["pb"].mission_embedding, np.array([0.0, 1.0]))
    assert np.array_equal(assembled["pb"].topic_embedding, np.array([1.0, 0.0]))


def test_assemble_inputs_other_cells_ignored(small_world):
    loc, snaps, index = small_world
    assembled = assemble_inputs("t2", loc, snaps, index, as_of=D0)
    # only the single t2 snapshot row feeds this cell
    assert set(assembled) == {"pa"}


def test_assemble_inputs_empty_cell(small_world):
    loc, _, index = small_world
    assert assemble_inputs("t9", loc, [], index) == {}


def test_assemble_inputs_missing_embedding_raises(small_world):
    loc, snaps, _ = small_world
    bare = EmbeddingIndex.from_records([EmbeddingRecord("t1", "topic_definition", (1.0, 0.0))])
    with pytest.raises(DataError, match="provider_mission"):
        assemble_inputs("t1", loc, snaps, bare)
    no_topic = EmbeddingIndex.from_records(
        [
            EmbeddingRecord("pa", "provider_mission", (1.0, 0.0)),
            EmbeddingRecord("pb", "provider_mission", (0.0, 1.0)),
        ]
    )
    with pytest.raises(DataError, match="topic_definition"):
        assemble_inputs("t1", loc, snaps, no_topic)


def test_assemble_inputs_recency_prefers_recent_days():
    loc = Locale("en", "US")
    index = EmbeddingIndex.from_records(
        [
            EmbeddingRecord("pa", "provider_mission", (1.0, 0.0)),
            EmbeddingRecord("pb", "provider_mission", (1.0, 0.0)),
            EmbeddingRecord("t1", "topic_definition", (1.0, 0.0)),
        ]
    )
    snaps = [
        # pa: high long ago, low recently; pb: the reverse
        snapshot(provider="pa", day=0, ctr=0.9),
        snapshot(provider="pa", day=6, ctr=0.1),
        snapshot(provider="pb", day=0, ctr=0.1),
        snapshot(provider="pb", day=6, ctr=0.9),
    ]
    assembled = assemble_inputs("t1", loc, snaps, index, decay=0.5)
    assert assembled["pb"].numeric["ctr"] == 1.0
    assert assembled["pa"].numeric["ctr"] == 0.0


def test_assembled_input_shape_mismatch():
    from ptrank.features import AssembledInput

    with pytest.raises(DataError):
        AssembledInput(
            mission_embedding=np.ones(3), topic_embedding=np.ones(4), numeric=numeric()
        )
