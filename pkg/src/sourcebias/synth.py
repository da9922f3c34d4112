"""Synthetic mention data with planted structure, for tests and demos.

Both generators return :class:`MentionRecord` lists with mention times
spread uniformly over a one-week window, so they go through the same
ingest path as real files.
"""
from __future__ import annotations

from datetime import datetime, timedelta, timezone

import numpy as np

from .ingest import MentionRecord, format_time

DEFAULT_START = datetime(2016, 10, 1, tzinfo=timezone.utc)
WEEK = timedelta(days=7)


def _records(R: np.ndarray, rng: np.random.Generator, start: datetime, span: timedelta,
             source_names, event_ids) -> list[MentionRecord]:
    s, e = np.nonzero(R)
    offsets = rng.integers(0, int(span.total_seconds()), size=len(s))
    t0 = int(start.timestamp())
    return [
        MentionRecord(event_ids[j], source_names[i], datetime.fromtimestamp(t0 + int(dt), timezone.utc))
        for i, j, dt in zip(s, e, offsets)
    ]


def _names(prefix: str, n: int) -> list[str]:
    width = len(str(max(n - 1, 0)))
    return [f"{prefix}{i:0{width}d}" for i in range(n)]


def planted_blocks(n_sources=200, n_events=2000, source_groups=4, event_groups=4,
                   p_in=0.3, p_out=0.01, seed=0, start=DEFAULT_START, span=WEEK):
    """Block model: source block ``b`` covers events in block ``b mod event_groups``
    with probability ``p_in`` and everything else with ``p_out``.

    Blocks are contiguous and equal-sized, so expected event popularity is the
    same in every event block.  Returns ``(records, window, source_block, event_block)``.
    """
    rng = np.random.default_rng(seed)
    sb = np.arange(n_sources) * source_groups // n_sources
    eb = np.arange(n_events) * event_groups // n_events
    prob = np.where((sb[:, None] % event_groups) == eb[None, :], p_in, p_out)
    R = rng.random((n_sources, n_events)) < prob
    src = [f"s{n}.example" for n in _names("", n_sources)]
    evt = _names("ev", n_events)
    records = _records(R, rng, start, span, src, evt)
    return records, (start, start + span), sb, eb


def skewed_landscape(n_hot=10, n_diverse=90, n_niches=9, hot_events=300, niche_events=200,
                     p_hot=0.98, p_niche=0.35, p_hot_by_diverse=0.02, p_noise=0.01,
                     seed=0, start=DEFAULT_START, span=WEEK):
    """A few near-duplicate, very active sources plus many small niche sources.

    The ``n_hot`` sources cover the shared hot pool with probability ``p_hot``.
    Each diverse source belongs to one niche and covers that niche's events
    with probability ``p_niche`` and hot events with ``p_hot_by_diverse``.
    Returns ``(records, window, is_hot)`` with ``is_hot`` per source name order.
    """
    rng = np.random.default_rng(seed)
    n_sources = n_hot + n_diverse
    n_events = hot_events + n_niches * niche_events
    is_hot = np.arange(n_sources) < n_hot
    niche = np.where(is_hot, -1, (np.arange(n_sources) - n_hot) % n_niches)
    ev_niche = np.concatenate((np.full(hot_events, -1), np.repeat(np.arange(n_niches), niche_events)))

    prob = np.full((n_sources, n_events), p_noise)
    hot_cols = ev_niche == -1
    prob[np.ix_(is_hot, hot_cols)] = p_hot
    prob[np.ix_(~is_hot, hot_cols)] = p_hot_by_diverse
    same_niche = (niche[:, None] == ev_niche[None, :]) & (niche[:, None] >= 0)
    prob[same_niche] = p_niche
    R = rng.random((n_sources, n_events)) < prob
    src = _names("src", n_sources)
    evt = _names("ev", n_events)
    records = _records(R, rng, start, span, src, evt)
    return records, (start, start + span), is_hot


def write_simple_tsv(records, fh):
    """Write records in the simple three-column layout."""
    for r in records:
        fh.write(f"{r.event_id}\t{r.source_name}\t{format_time(r.mention_time)}\n")
