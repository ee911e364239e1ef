"""Shared fixtures and the acceptance summary hook.

The acceptance tests append one verdict line each to ACCEPTANCE_LINES;
the terminal summary hook replays them after the run so the verdicts are
visible without -s.
"""

import datetime as dt

import pytest

from ptrank.catalog import FEATURE_NAMES, FeatureSnapshot, Locale
from ptrank.features import NumericFeatures

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)


@pytest.fixture
def en_us():
    return Locale("en", "US")


def numeric(**overrides) -> NumericFeatures:
    """NumericFeatures with every key at 0.5 unless overridden."""
    values = {name: 0.5 for name in FEATURE_NAMES}
    values.update(overrides)
    return NumericFeatures(values)


def snapshot(provider="p1", topic="t1", locale=None, day=0, **overrides) -> FeatureSnapshot:
    """A valid snapshot for 2024-01-01 + day with middling values."""
    values = {
        "popularity": 0.5,
        "brand_mission_alignment": 0.5,
        "eligible_article_count_7d": 10.0,
        "high_quality_doc_ratio": 0.5,
        "provider_doc_ratio": 0.5,
        "click_dwell_time": 60.0,
        "ctr": 0.5,
        "user_feedback": 0.5,
    }
    values.update(overrides)
    return FeatureSnapshot(
        provider=provider,
        topic=topic,
        locale=locale or Locale("en", "US"),
        date=dt.date(2024, 1, 1) + dt.timedelta(days=day),
        values=values,
    )
