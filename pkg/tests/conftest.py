from datetime import datetime, timedelta, timezone

import numpy as np
import pytest

from sourcebias.ingest import MentionRecord, build_dataset

T0 = datetime(2016, 10, 1, tzinfo=timezone.utc)
WINDOW = (T0, T0 + timedelta(days=7))


def rec(event, source, hours=0.0):
    return MentionRecord(event, source, T0 + timedelta(hours=hours))


def dataset_from_pairs(pairs, hours=None, window=WINDOW):
    """Unfiltered dataset from (source, event) name pairs."""
    hours = hours or [1.0] * len(pairs)
    records = [rec(e, s, h) for (s, e), h in zip(pairs, hours)]
    return build_dataset(records, window, 1, 1)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def planted():
    """Planted 4x4 block dataset and its seed-0 split."""
    from sourcebias.ingest import split_leave_one_out
    from sourcebias.synth import planted_blocks

    records, window, _, _ = planted_blocks(seed=0)
    ds = build_dataset(records, window, 5, 5)
    return ds, split_leave_one_out(ds, seed=0)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
