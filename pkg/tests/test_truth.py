"""Ground-truth pipeline: sampling, consensus, labeling, the gate."""

import json
import sys
import types

import pytest

from ptrank.catalog import Judgment, Locale
from ptrank.errors import ConfigError, DataError, LabelParseError, LabelTransportError
from ptrank.truth import (
    DEFAULT_PROMPT_TEMPLATE,
    AgreementReport,
    CandidateSet,
    HttpLabelerClient,
    LabelResponse,
    MockLabelerClient,
    agreement,
    assign_relevance,
    consensus_vote,
    parse_label_payload,
    render_prompt,
    request_labels,
    sample_candidates,
)
from ptrank.weak import RankedSlate

EN_US = Locale("en", "US")


def make_slate(n=35, topic="t1"):
    entries = tuple((f"p{i:02d}", float(n - i)) for i in range(n))
    return RankedSlate(topic=topic, locale=EN_US, entries=entries)


def make_candidates(positives=("p1", "p2"), negatives=("n1", "n2"), topic="t1"):
    return CandidateSet(
        topic=topic, locale=EN_US, positives=tuple(positives), negatives=tuple(negatives), seed=7
    )


# ---------------------------------------------------------------------------
# Candidate sampling
# ---------------------------------------------------------------------------


def test_sample_candidates_takes_top_30_plus_negatives():
    slate = make_slate(40)
    pool = [f"p{i:02d}" for i in range(40)] + [f"x{i}" for i in range(20)]
    cand = sample_candidates(slate, pool, n_neg=12, seed=5)
    assert cand.positives == tuple(f"p{i:02d}" for i in range(30))
    assert len(cand.negatives) == 12
    assert not set(cand.positives) & set(cand.negatives)
    assert not cand.negative_shortfall
    # negatives come from the pool, not the positive block
    assert set(cand.negatives) <= set(pool) - set(cand.positives)


def test_sample_candidates_is_seed_deterministic():
    slate = make_slate(35)
    pool = [f"p{i:02d}" for i in range(35)] + [f"x{i}" for i in range(30)]
    a = sample_candidates(slate, pool, n_neg=10, seed=5)
    b = sample_candidates(slate, pool, n_neg=10, seed=5)
    c = sample_candidates(slate, pool, n_neg=10, seed=6)
    assert a == b
    assert a.negatives != c.negatives


def test_sample_candidates_shortfall_flagged():
    slate = make_slate(32)
    pool = [f"p{i:02d}" for i in range(32)]  # only 2 candidates beyond the top 30
    cand = sample_candidates(slate, pool, n_neg=10, seed=5)
    assert cand.negative_shortfall
    assert len(cand.negatives) == 2


def test_sample_candidates_bounds_and_pool_checks():
    slate = make_slate(31)
    pool = [f"p{i:02d}" for i in range(31)]
    with pytest.raises(ConfigError):
        sample_candidates(slate, pool, n_neg=9, seed=5)
    with pytest.raises(ConfigError):
        sample_candidates(slate, pool, n_neg=16, seed=5)
    with pytest.raises(DataError):
        sample_candidates(slate, pool[:10], n_neg=10, seed=5)


def test_candidate_set_rejects_overlap():
    with pytest.raises(DataError):
        make_candidates(positives=("p1",), negatives=("p1",))


# ---------------------------------------------------------------------------
# Consensus
# ---------------------------------------------------------------------------


def votes(provider, selections, topic="t1"):
    return [
        Judgment(topic, EN_US, provider, f"ann{i + 1}", sel) for i, sel in enumerate(selections)
    ]


def test_consensus_two_of_three_truth_table():
    accept = consensus_vote(votes("p1", [True, True, False]))[0]
    reject = consensus_vote(votes("p1", [True, False, False]))[0]
    assert accept.accepted and not accept.short_panel
    assert not reject.accepted and not reject.short_panel
    assert consensus_vote(votes("p1", [True, True, True]))[0].accepted
    assert not consensus_vote(votes("p1", [False, False, False]))[0].accepted


def test_consensus_short_panel_majority():
    lone = consensus_vote(votes("p1", [True]))[0]
    assert lone.accepted and lone.short_panel and lone.annotators == 1
    split = consensus_vote(votes("p1", [True, False]))[0]
    assert not split.accepted and split.short_panel  # a tie is not a majority


def test_consensus_duplicate_votes():
    identical = votes("p1", [True, True]) + [Judgment("t1", EN_US, "p1", "ann1", True)]
    result = consensus_vote(identical)[0]
    assert result.annotators == 2  # identical duplicate collapses
    conflicting = votes("p1", [True]) + [Judgment("t1", EN_US, "p1", "ann1", False)]
    with pytest.raises(DataError, match="conflicting"):
        consensus_vote(conflicting)


def test_consensus_multiple_providers_sorted():
    judgments = votes("pb", [True, True, False]) + votes("pa", [False, False, True])
    results = consensus_vote(judgments)
    assert [r.provider for r in results] == ["pa", "pb"]
    assert [r.accepted for r in results] == [False, True]


def test_consensus_guards():
    assert consensus_vote([]) == []
    mixed = votes("p1", [True]) + votes("p2", [True], topic="t2")
    with pytest.raises(DataError, match="single"):
        consensus_vote(mixed)
    with pytest.raises(ConfigError):
        consensus_vote(votes("p1", [True]), quorum=(3, 2))


def test_consensus_custom_quorum():
    results = consensus_vote(votes("p1", [True, False, False]), quorum=(1, 3))
    assert results[0].accepted


# ---------------------------------------------------------------------------
# Prompt rendering
# ---------------------------------------------------------------------------


def test_render_prompt_substitutes_all_placeholders():
    cand = make_candidates(positives=("alpha", "beta"), negatives=("gamma",))
    prompt = render_prompt("t1", EN_US, cand)
    assert "Topic: t1" in prompt
    assert "Market: en-US" in prompt
    assert "alpha\nbeta\ngamma" in prompt
    for placeholder in ("{topic}", "{locale}", "{candidates}"):
        assert placeholder not in prompt


def test_render_prompt_keeps_literal_braces():
    # the response-contract example in the default template uses braces
    prompt = render_prompt("t1", EN_US, make_candidates())
    assert '{"providers":' in prompt


def test_render_prompt_rejects_template_without_placeholders():
    with pytest.raises(ConfigError):
        render_prompt("t1", EN_US, make_candidates(), template="no placeholders here")


# ---------------------------------------------------------------------------
# Payload parsing
# ---------------------------------------------------------------------------


def test_parse_label_payload_happy_path():
    cand = make_candidates(positives=("p1", "p2"), negatives=("n1",))
    response = parse_label_payload({"providers": ["p2", "p1", "n1"]}, cand)
    assert response.ranked_providers == ("p2", "p1", "n1")
    assert response.source == "llm"
    assert response.additions == ()


def test_parse_label_payload_flags_additions():
    cand = make_candidates(positives=("p1",), negatives=("n1",))
    response = parse_label_payload({"providers": ["p1", "brand-new", "n1"]}, cand)
    assert response.additions == ("brand-new",)


@pytest.mark.parametrize(
    "payload",
    [
        "not a dict",
        {},
        {"providers": "p1"},
        {"providers": [1, 2]},
        {"providers": ["p1", "p1"]},
    ],
)
def test_parse_label_payload_rejects_malformed(payload):
    with pytest.raises(LabelParseError):
        parse_label_payload(payload, make_candidates())


def test_label_response_validation():
    with pytest.raises(DataError):
        LabelResponse(topic="t", locale=EN_US, ranked_providers=("a", "a"), source="llm")
    with pytest.raises(DataError):
        LabelResponse(topic="t", locale=EN_US, ranked_providers=("a",), source="oracle")


# ---------------------------------------------------------------------------
# Labeler clients
# ---------------------------------------------------------------------------


def test_mock_labeler_round_trip(tmp_path):
    (tmp_path / "t1.json").write_text(json.dumps({"providers": ["p1", "p2"]}), encoding="utf-8")
    client = MockLabelerClient(tmp_path)
    cand = make_candidates(positives=("p1", "p2"), negatives=("n1",))
    response = request_labels(client, cand)
    assert response.ranked_providers == ("p1", "p2")


def test_mock_labeler_missing_and_malformed(tmp_path):
    client = MockLabelerClient(tmp_path)
    with pytest.raises(LabelTransportError):
        client.fetch("prompt", topic="absent", locale=EN_US)
    (tmp_path / "bad.json").write_text("{nope", encoding="utf-8")
    with pytest.raises(LabelParseError):
        client.fetch("prompt", topic="bad", locale=EN_US)


class FakeResponse:
    def __init__(self, status_code=200, payload=None, text="?"):
        self.status_code = status_code
        self._payload = payload
        self.text = text

    def json(self):
        if self._payload is None:
            raise ValueError("not json")
        return self._payload


class FakeRequests(types.ModuleType):
    """Stands in for the requests module inside HttpLabelerClient.fetch."""

    class RequestException(Exception):
        pass

    def __init__(self, script):
        super().__init__("requests")
        self.script = list(script)
        self.calls = []

    def post(self, url, json=None, timeout=None):
        self.calls.append({"url": url, "json": json, "timeout": timeout})
        action = self.script.pop(0)
        if isinstance(action, Exception):
            raise action
        return action


@pytest.fixture
def fake_requests(monkeypatch):
    def install(script):
        fake = FakeRequests(script)
        monkeypatch.setitem(sys.modules, "requests", fake)
        return fake

    return install


def test_http_labeler_posts_prompt(fake_requests):
    fake = fake_requests([FakeResponse(200, {"providers": ["p1"]})])
    client = HttpLabelerClient("http://labeler.test/rank", retry_delay=0.0)
    payload = client.fetch("the prompt", topic="t1", locale=EN_US)
    assert payload == {"providers": ["p1"]}
    assert fake.calls[0]["url"] == "http://labeler.test/rank"
    assert fake.calls[0]["json"] == {"prompt": "the prompt"}


def test_http_labeler_retries_5xx_then_succeeds(fake_requests):
    fake = fake_requests([FakeResponse(503), FakeResponse(200, {"providers": []})])
    client = HttpLabelerClient("http://labeler.test", attempts=3, retry_delay=0.0)
    assert client.fetch("p", topic="t1", locale=EN_US) == {"providers": []}
    assert len(fake.calls) == 2


def test_http_labeler_retries_transport_errors(fake_requests):
    fake = fake_requests([FakeRequests.RequestException("boom"), FakeResponse(200, {"ok": 1})])
    client = HttpLabelerClient("http://labeler.test", attempts=2, retry_delay=0.0)
    assert client.fetch("p", topic="t1", locale=EN_US) == {"ok": 1}
    assert len(fake.calls) == 2


def test_http_labeler_gives_up_after_attempts(fake_requests):
    fake = fake_requests([FakeResponse(500)] * 3)
    client = HttpLabelerClient("http://labeler.test", attempts=3, retry_delay=0.0)
    with pytest.raises(LabelTransportError, match="3 attempt"):
        client.fetch("p", topic="t1", locale=EN_US)
    assert len(fake.calls) == 3


def test_http_labeler_4xx_fails_fast(fake_requests):
    fake = fake_requests([FakeResponse(404)])
    client = HttpLabelerClient("http://labeler.test", attempts=3, retry_delay=0.0)
    with pytest.raises(LabelTransportError, match="404"):
        client.fetch("p", topic="t1", locale=EN_US)
    assert len(fake.calls) == 1


def test_http_labeler_non_json_body(fake_requests):
    fake_requests([FakeResponse(200, None, text="<html>")])
    client = HttpLabelerClient("http://labeler.test", retry_delay=0.0)
    with pytest.raises(LabelParseError):
        client.fetch("p", topic="t1", locale=EN_US)


def test_http_labeler_rejects_zero_attempts():
    with pytest.raises(ConfigError):
        HttpLabelerClient("http://labeler.test", attempts=0)


# ---------------------------------------------------------------------------
# Agreement gate
# ---------------------------------------------------------------------------


def test_agreement_two_thirds_fails_gate():
    report = agreement({"A", "B", "C"}, {"A", "B", "D"})
    assert report.precision == 2 / 3
    assert report.recall == 2 / 3
    assert not report.passed


def test_agreement_passes_iff_both_at_threshold():
    # 19/20 = 0.95 exactly on both sides
    llm = {f"p{i}" for i in range(19)} | {"extra"}
    human = {f"p{i}" for i in range(19)} | {"other"}
    report = agreement(llm, human)
    assert report.precision == 0.95
    assert report.recall == 0.95
    assert report.passed
    assert not agreement({f"p{i}" for i in range(18)} | {"a", "b"}, human).passed


def test_agreement_accepts_label_response():
    response = LabelResponse(topic="t", locale=EN_US, ranked_providers=("A", "B"), source="llm")
    report = agreement(response, {"A", "B"})
    assert report.passed


def test_agreement_empty_cases():
    report = agreement(set(), {"A"})
    assert report.precision == 0.0
    assert "empty_labeler_list" in report.flags
    with pytest.raises(DataError):
        agreement({"A"}, set())


def test_agreement_report_consistency_enforced():
    with pytest.raises(DataError):
        AgreementReport(precision=1.0, recall=1.0, passed=False)


# ---------------------------------------------------------------------------
# Relevance assignment
# ---------------------------------------------------------------------------


def test_assign_relevance_grades_rank_order():
    response = LabelResponse(
        topic="t", locale=EN_US, ranked_providers=("first", "second", "third"), source="llm"
    )
    slate = assign_relevance(response, negatives=("n1", "n2"), slate_capacity=10)
    assert slate.relevance_of("first") == 3
    assert slate.relevance_of("second") == 2
    assert slate.relevance_of("third") == 1
    assert slate.relevance_of("n1") == 0
    assert slate.relevance_of("n2") == 0
    assert len(slate.items) == 5


def test_assign_relevance_truncates_ranked_to_capacity():
    response = LabelResponse(
        topic="t", locale=EN_US, ranked_providers=tuple(f"p{i}" for i in range(28)), source="llm"
    )
    slate = assign_relevance(response, negatives=("n1", "n2", "n3"), slate_capacity=30)
    graded = [it for it in slate.items if it.relevance > 0]
    assert len(graded) == 27  # capacity minus the negatives
    assert slate.relevance_of("p0") == 27
    assert slate.relevance_of("p26") == 1
    assert "p27" not in [it.provider for it in slate.items]


def test_assign_relevance_guards():
    response = LabelResponse(topic="t", locale=EN_US, ranked_providers=("a", "b"), source="llm")
    with pytest.raises(DataError, match="overlap"):
        assign_relevance(response, negatives=("b",))
    with pytest.raises(DataError, match="repeats"):
        assign_relevance(response, negatives=("n1", "n1"))
    with pytest.raises(DataError, match="no room"):
        assign_relevance(response, negatives=tuple(f"n{i}" for i in range(30)), slate_capacity=30)
    with pytest.raises(ConfigError):
        assign_relevance(response, negatives=(), slate_capacity=1)


def test_default_prompt_mentions_contract_pieces():
    # the rendered instructions must carry the rank-30 task and JSON shape
    assert "top 30 publishers" in DEFAULT_PROMPT_TEMPLATE
    assert '"providers"' in DEFAULT_PROMPT_TEMPLATE
