"""Equality, novelty and retention statistics for a subset of sources."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .ingest import InteractionDataset


@dataclass(frozen=True, eq=False)
class CoverageProfile:
    counts: np.ndarray  # per-event article counts within the subset (all events)
    total_articles: int
    unique_events: int

    @property
    def ratio(self) -> float:
        """Events per article; 1.0 means no two sources covered the same event."""
        return self.unique_events / self.total_articles

    def covered_counts(self) -> np.ndarray:
        return self.counts[self.counts > 0]

    def gini(self, universe: str = "subset") -> float:
        if universe == "subset":
            return gini(self.covered_counts())
        if universe == "all":
            return gini(self.counts)
        raise ValueError(f"unknown gini universe {universe!r}")


def coverage_profile(train: InteractionDataset, selected_sources) -> CoverageProfile:
    sel = np.unique(np.asarray(selected_sources, dtype=np.int64))
    if sel.size == 0:
        raise ValueError("empty selection")
    if sel[0] < 0 or sel[-1] >= train.n_sources:
        raise IndexError("selected source out of range")
    mask = np.isin(train.source_idx, sel)
    counts = np.bincount(train.event_idx[mask], minlength=train.n_events)
    return CoverageProfile(counts, int(counts.sum()), int(np.count_nonzero(counts)))


def _check_counts(counts) -> np.ndarray:
    x = np.asarray(counts, dtype=np.float64).ravel()
    if x.size == 0:
        raise ValueError("counts must be non-empty")
    if np.any(x < 0):
        raise ValueError("counts must be non-negative")
    if x.sum() <= 0:
        raise ValueError("counts must not all be zero")
    return x


def gini(counts) -> float:
    """Gini coefficient ``sum_ij |x_i - x_j| / (2 n^2 mean)`` in O(n log n)."""
    x = np.sort(_check_counts(counts))
    n = x.size
    rank_weights = 2.0 * np.arange(1, n + 1) - n - 1
    return float(rank_weights @ x / (n * x.sum()))


def lorenz_points(counts) -> np.ndarray:
    """(population share, coverage share) points from (0, 0) to (1, 1)."""
    x = np.sort(_check_counts(counts))
    n = x.size
    cum = np.concatenate(([0.0], np.cumsum(x)))
    pts = np.column_stack((np.arange(n + 1) / n, cum / cum[-1]))
    pts[-1] = (1.0, 1.0)
    return pts


def top_events(train: InteractionDataset, top_n: int) -> np.ndarray:
    """Indices of the ``top_n`` most covered events (ties by ascending index)."""
    deg = train.event_degrees()
    order = np.lexsort((np.arange(train.n_events), -deg))
    return order[:top_n]


def top_event_retention(train: InteractionDataset, selected_sources, top_n: int) -> float:
    if top_n < 1:
        raise ValueError("top_n must be >= 1")
    if top_n > train.n_events:
        warnings.warn(f"top_n={top_n} exceeds {train.n_events} events; clamping", stacklevel=2)
        top_n = train.n_events
    profile = coverage_profile(train, selected_sources)
    top = top_events(train, top_n)
    return float(np.count_nonzero(profile.counts[top]) / top_n)


def coverage_metrics(train: InteractionDataset, selected_sources,
                     retention_at=(100, 1000, 5000), gini_universe: str = "subset") -> dict:
    """Metrics block for a selection, as written to JSON by the CLI."""
    profile = coverage_profile(train, selected_sources)
    retention = {}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for t in retention_at:
            retention[f"top_{t}"] = top_event_retention(train, selected_sources, t)
    return {
        "gini": profile.gini(gini_universe),
        "gini_universe": gini_universe,
        "ratio_events_articles": profile.ratio,
        "total_articles": profile.total_articles,
        "unique_events": profile.unique_events,
        "retention": retention,
    }
