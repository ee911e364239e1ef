"""Ground-truth pipeline: candidate sampling, consensus, labeling, gating.

Candidates for labeling mix the current top-30 ranking (positives) with
randomly drawn negatives. Human judgments reach consensus by 2-of-3
agreement; an LLM labeler is trusted only after its precision and recall
against that consensus both reach 0.95. Accepted ranked lists become
graded training slates: rank r of N gets relevance N - r + 1 and every
sampled negative gets 0.
"""

from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Protocol, Sequence

from .catalog import Judgment, Locale, SlateExample, SlateItem
from .errors import ConfigError, DataError, LabelParseError, LabelTransportError
from .metrics import set_precision_recall
from .seeding import derived_rng
from .weak import RankedSlate, top_k

logger = logging.getLogger(__name__)

AGREEMENT_THRESHOLD = 0.95
POSITIVE_POOL_SIZE = 30
NEGATIVE_RANGE = (10, 15)
DEFAULT_QUORUM = (2, 3)

DEFAULT_PROMPT_TEMPLATE = """\
You are a news feed curator who publishes both news and magazine articles, occasionally including timeless pieces that can be enjoyed at leisure. Each article, whether news or magazine style, revolves around a subject or theme. For instance, a news article like '5 Marines aboard helicopter that crashed outside San Diego confirmed dead' discusses an accident. Conversely, a magazine article such as 'See Inside Delta’s Refreshed Cabins — With Revamped Premium Seating, 10-inch Seatback Screens, and More' is timeless and focuses on Air Travel.

News about recent accidents can be covered by multiple publishers in the journalism industry. Your task is to rank these publishers based on their popularity, trustworthiness among readers, article quality, and expertise on a given topic and its broad readership. For each topic I provide, can you rank the top 30 publishers?

Topic: {topic}
Market: {locale}

Candidate publishers, one per line. You may add a publisher that is missing or remove one that does not belong:
{candidates}

Respond with a single JSON object of the form {"providers": ["best publisher", "second best", "..."]} listing publishers best first.
"""

PROMPT_PLACEHOLDERS = ("{topic}", "{locale}", "{candidates}")


@dataclass(frozen=True)
class CandidateSet:
    """Labeling candidates for one (topic, locale): positives + negatives."""

    topic: str
    locale: Locale
    positives: tuple[str, ...]
    negatives: tuple[str, ...]
    seed: int
    negative_shortfall: bool = False

    def __post_init__(self):
        overlap = set(self.positives) & set(self.negatives)
        if overlap:
            raise DataError(f"candidate positives and negatives overlap: {sorted(overlap)}")

    def all_providers(self) -> list[str]:
        return list(self.positives) + list(self.negatives)

    def to_record(self) -> dict:
        return {
            "topic": self.topic,
            "locale": str(self.locale),
            "positives": list(self.positives),
            "negatives": list(self.negatives),
            "seed": int(self.seed),
            "negative_shortfall": bool(self.negative_shortfall),
        }

    @classmethod
    def from_record(cls, obj: dict, path: str = "<memory>", lineno: int = 0) -> "CandidateSet":
        try:
            return cls(
                topic=obj["topic"],
                locale=Locale.parse(obj["locale"]),
                positives=tuple(obj["positives"]),
                negatives=tuple(obj["negatives"]),
                seed=int(obj["seed"]),
                negative_shortfall=bool(obj.get("negative_shortfall", False)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise DataError(f"bad candidate record: {exc}", path=path, line=lineno) from None


@dataclass(frozen=True)
class LabelResponse:
    """A ranked provider list for one (topic, locale), human or LLM sourced."""

    topic: str
    locale: Locale
    ranked_providers: tuple[str, ...]
    source: str
    additions: tuple[str, ...] = ()

    def __post_init__(self):
        if self.source not in ("human_consensus", "llm"):
            raise DataError(f"label source must be human_consensus or llm, got {self.source!r}")
        if len(set(self.ranked_providers)) != len(self.ranked_providers):
            raise DataError(f"label response for {self.topic!r} repeats a provider")

    def to_record(self) -> dict:
        return {
            "topic": self.topic,
            "locale": str(self.locale),
            "providers": list(self.ranked_providers),
            "source": self.source,
            "additions": list(self.additions),
        }

    @classmethod
    def from_record(cls, obj: dict, path: str = "<memory>", lineno: int = 0) -> "LabelResponse":
        try:
            return cls(
                topic=obj["topic"],
                locale=Locale.parse(obj["locale"]),
                ranked_providers=tuple(obj["providers"]),
                source=obj["source"],
                additions=tuple(obj.get("additions", ())),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise DataError(f"bad label record: {exc}", path=path, line=lineno) from None


@dataclass(frozen=True)
class ConsensusResult:
    provider: str
    accepted: bool
    annotators: int
    # True when fewer annotators than the quorum total voted; acceptance
    # then falls back to a simple majority of those present.
    short_panel: bool

    def to_record(self, topic: str, locale: Locale) -> dict:
        return {
            "topic": topic,
            "locale": str(locale),
            "provider": self.provider,
            "accepted": bool(self.accepted),
            "annotators": int(self.annotators),
            "short_panel": bool(self.short_panel),
        }


@dataclass(frozen=True)
class AgreementReport:
    """Precision/recall of a labeler against the human consensus set."""

    precision: float
    recall: float
    passed: bool
    flags: tuple[str, ...] = ()

    def __post_init__(self):
        should_pass = self.precision >= AGREEMENT_THRESHOLD and self.recall >= AGREEMENT_THRESHOLD
        if self.passed != should_pass:
            raise DataError("agreement 'passed' flag inconsistent with precision/recall")


def sample_candidates(
    weak_slate: RankedSlate,
    provider_pool: Sequence[str],
    n_neg: int,
    seed: int,
) -> CandidateSet:
    """Top-30 positives plus ``n_neg`` seeded uniform negatives from the pool.

    Negatives are drawn without replacement from the pool minus the
    positives. If fewer are available, all of them are taken and the
    shortfall is flagged. Reproducible for a fixed seed.
    """
    lo, hi = NEGATIVE_RANGE
    if not lo <= n_neg <= hi:
        raise ConfigError(f"n_neg must be within [{lo}, {hi}], got {n_neg}")
    pool = set(provider_pool)
    missing = set(weak_slate.providers()) - pool
    if missing:
        raise DataError(f"provider pool lacks ranked providers: {sorted(missing)[:5]}")
    positives = tuple(top_k(weak_slate, POSITIVE_POOL_SIZE).providers())
    eligible = sorted(pool - set(positives))
    take = min(n_neg, len(eligible))
    shortfall = take < n_neg
    if shortfall:
        logger.warning(
            "topic %s: only %d negatives available (wanted %d)", weak_slate.topic, take, n_neg
        )
    rng = derived_rng(seed, "sample_candidates", weak_slate.topic, str(weak_slate.locale))
    chosen = sorted(rng.choice(len(eligible), size=take, replace=False).tolist()) if take else []
    negatives = tuple(eligible[i] for i in chosen)
    return CandidateSet(
        topic=weak_slate.topic,
        locale=weak_slate.locale,
        positives=positives,
        negatives=negatives,
        seed=seed,
        negative_shortfall=shortfall,
    )


def consensus_vote(
    judgments: Sequence[Judgment],
    quorum: tuple[int, int] = DEFAULT_QUORUM,
) -> list[ConsensusResult]:
    """Fold one (topic, locale)'s judgments into per-provider accept/reject.

    With a full panel (at least ``quorum[1]`` annotators) a provider is
    accepted when at least ``quorum[0]`` selected it. A short panel falls
    back to a strict majority of those present, and the result is marked
    ``short_panel``. Conflicting duplicate votes from one annotator are a
    data error; identical duplicates collapse.
    """
    if not judgments:
        return []
    agree, total = quorum
    if not 1 <= agree <= total:
        raise ConfigError(f"quorum must satisfy 1 <= agree <= total, got {quorum}")
    cell = (judgments[0].topic, judgments[0].locale)
    votes: dict[str, dict[str, bool]] = {}
    for j in judgments:
        if (j.topic, j.locale) != cell:
            raise DataError("consensus_vote expects judgments for a single (topic, locale)")
        per_provider = votes.setdefault(j.provider, {})
        if j.annotator in per_provider and per_provider[j.annotator] != j.selected:
            raise DataError(
                f"annotator {j.annotator!r} cast conflicting votes for provider {j.provider!r}"
            )
        per_provider[j.annotator] = j.selected
    results = []
    for provider in sorted(votes):
        per_provider = votes[provider]
        n = len(per_provider)
        yes = sum(per_provider.values())
        if n >= total:
            accepted = yes >= agree
            short = False
        else:
            accepted = 2 * yes > n
            short = True
        results.append(ConsensusResult(provider=provider, accepted=accepted, annotators=n, short_panel=short))
    return results


def render_prompt(
    topic: str,
    locale: Locale,
    candidates: CandidateSet,
    template: str = DEFAULT_PROMPT_TEMPLATE,
) -> str:
    """Substitute {topic}, {locale} and {candidates} into the template.

    The candidate list is serialized one provider per line. Placeholders
    are replaced literally, so templates may contain other braces.
    """
    for placeholder in PROMPT_PLACEHOLDERS:
        if placeholder not in template:
            raise ConfigError(f"prompt template is missing the {placeholder} placeholder")
    providers = candidates.all_providers()
    if not providers:
        logger.warning("topic %s: rendering prompt with an empty candidate list", topic)
    return (
        template.replace("{topic}", topic)
        .replace("{locale}", str(locale))
        .replace("{candidates}", "\n".join(providers))
    )


class LabelerClient(Protocol):
    """Anything that can turn a prompt into a raw labeler payload."""

    def fetch(self, prompt: str, *, topic: str, locale: Locale) -> dict: ...


class HttpLabelerClient:
    """POSTs {"prompt": ...} to an endpoint returning {"providers": [...]}.

    Transport failures and 5xx responses are retried up to ``attempts``
    times with a fixed delay, then raised as :class:`LabelTransportError`.
    """

    def __init__(self, endpoint: str, attempts: int = 3, timeout: float = 30.0, retry_delay: float = 0.5):
        if attempts < 1:
            raise ConfigError(f"attempts must be >= 1, got {attempts}")
        self.endpoint = endpoint
        self.attempts = attempts
        self.timeout = timeout
        self.retry_delay = retry_delay

    def fetch(self, prompt: str, *, topic: str, locale: Locale) -> dict:
        import requests

        last_error: Exception | None = None
        for attempt in range(self.attempts):
            if attempt and self.retry_delay:
                time.sleep(self.retry_delay)
            try:
                response = requests.post(self.endpoint, json={"prompt": prompt}, timeout=self.timeout)
            except requests.RequestException as exc:
                last_error = exc
                continue
            if 500 <= response.status_code < 600:
                last_error = LabelTransportError(f"server error {response.status_code}")
                continue
            if response.status_code != 200:
                raise LabelTransportError(
                    f"labeler endpoint returned status {response.status_code} for topic {topic!r}"
                )
            try:
                return response.json()
            except ValueError as exc:
                raise LabelParseError(f"labeler response is not JSON: {exc}", payload=response.text) from None
        raise LabelTransportError(
            f"labeler endpoint unreachable after {self.attempts} attempt(s): {last_error}"
        )


class MockLabelerClient:
    """Serves canned payloads from a directory of ``<topic>.json`` files."""

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)

    def fetch(self, prompt: str, *, topic: str, locale: Locale) -> dict:
        path = self.directory / f"{topic}.json"
        if not path.exists():
            raise LabelTransportError(f"no canned response for topic {topic!r} at {path}")
        try:
            return json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise LabelParseError(f"canned response for {topic!r} is not JSON: {exc}", payload=str(path)) from None


def parse_label_payload(payload: dict, candidates: CandidateSet) -> LabelResponse:
    """Validate the strict response contract and flag off-list additions.

    The payload must be an object whose "providers" member is an array of
    distinct strings in rank order. Providers outside the candidate list
    are kept but recorded as additions (the prompt allows adding one).
    """
    if not isinstance(payload, dict) or "providers" not in payload:
        raise LabelParseError("labeler payload must be an object with a 'providers' array", payload=payload)
    providers = payload["providers"]
    if not isinstance(providers, list) or not all(isinstance(p, str) for p in providers):
        raise LabelParseError("'providers' must be an array of strings", payload=payload)
    if len(set(providers)) != len(providers):
        raise LabelParseError("'providers' contains duplicates", payload=payload)
    known = set(candidates.all_providers())
    additions = tuple(p for p in providers if p not in known)
    return LabelResponse(
        topic=candidates.topic,
        locale=candidates.locale,
        ranked_providers=tuple(providers),
        source="llm",
        additions=additions,
    )


def request_labels(
    client: LabelerClient,
    candidates: CandidateSet,
    template: str = DEFAULT_PROMPT_TEMPLATE,
) -> LabelResponse:
    """Render the prompt, call the labeler, and parse its ranked answer."""
    prompt = render_prompt(candidates.topic, candidates.locale, candidates, template)
    payload = client.fetch(prompt, topic=candidates.topic, locale=candidates.locale)
    return parse_label_payload(payload, candidates)


def agreement(llm: LabelResponse | Iterable[str], human: Iterable[str]) -> AgreementReport:
    """Set precision/recall of the labeler against consensus-accepted ids.

    precision = |llm ∩ human| / |llm|, recall = |llm ∩ human| / |human|.
    An empty labeler list reports precision 0 with a flag. The human set
    must be non-empty.
    """
    llm_set = set(llm.ranked_providers) if isinstance(llm, LabelResponse) else set(llm)
    human_set = set(human)
    if not human_set:
        raise DataError("agreement needs a non-empty human consensus set")
    flags: list[str] = []
    if not llm_set:
        flags.append("empty_labeler_list")
    precision, recall = set_precision_recall(llm_set, human_set)
    passed = precision >= AGREEMENT_THRESHOLD and recall >= AGREEMENT_THRESHOLD
    return AgreementReport(precision=precision, recall=recall, passed=passed, flags=tuple(flags))


def read_candidate_sets(path: str | Path) -> list[CandidateSet]:
    from .catalog import read_jsonl

    return [CandidateSet.from_record(obj, str(path), lineno) for lineno, obj in read_jsonl(path)]


def read_label_responses(path: str | Path) -> list[LabelResponse]:
    from .catalog import read_jsonl

    return [LabelResponse.from_record(obj, str(path), lineno) for lineno, obj in read_jsonl(path)]


def assign_relevance(
    response: LabelResponse,
    negatives: Sequence[str],
    slate_capacity: int = 30,
) -> SlateExample:
    """Grade a ranked list into a training slate.

    Rank r of N gets relevance N - r + 1 (best rank gets N, last gets 1)
    and each negative gets 0. If ranked + negatives exceed the slate
    capacity the ranked list is truncated first.
    """
    if slate_capacity < 2:
        raise ConfigError(f"slate capacity must be >= 2, got {slate_capacity}")
    ranked = list(response.ranked_providers)
    overlap = set(ranked) & set(negatives)
    if overlap:
        raise DataError(f"ranked providers overlap the negatives: {sorted(overlap)}")
    if len(set(negatives)) != len(negatives):
        raise DataError("negatives list repeats a provider")
    room = slate_capacity - len(negatives)
    if room < 1:
        raise DataError(
            f"{len(negatives)} negatives leave no room for ranked providers (capacity {slate_capacity})"
        )
    ranked = ranked[:room]
    n = len(ranked)
    items = [SlateItem(provider=p, relevance=n - r) for r, p in enumerate(ranked)]
    items.extend(SlateItem(provider=p, relevance=0) for p in negatives)
    return SlateExample(topic=response.topic, locale=response.locale, items=tuple(items))
