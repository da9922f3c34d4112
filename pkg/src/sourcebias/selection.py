"""Greedy maximal-marginal-relevance selection of news sources."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ingest import InteractionDataset
from .model import FactorModel


@dataclass(frozen=True)
class SelectionConfig:
    n: int
    beta: float = 0.5
    epsilon: float = 1e-9

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError("beta must lie in [0, 1]")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")


@dataclass(frozen=True)
class SelectionResult:
    picks: list[int]
    scores: list[float]

    def __len__(self):
        return len(self.picks)


def relevance_scores(train: InteractionDataset) -> np.ndarray:
    """Distinct events covered per source, divided by the maximum."""
    counts = train.source_degrees().astype(np.float64)
    if counts.size == 0 or counts.max() == 0:
        raise ValueError("empty training data")
    return counts / counts.max()


def similarity(model: FactorModel, i: int, j: int, epsilon: float = 1e-9) -> float:
    if i == j:
        raise ValueError("self-similarity is undefined")
    dist = np.linalg.norm(model.P[:, i] - model.P[:, j])
    return 1.0 / max(dist, epsilon)


def mmr_select(model: FactorModel, relevance, config: SelectionConfig) -> SelectionResult:
    """Pick ``config.n`` sources greedily.

    The first pick is the most relevant source.  Each later pick maximizes
    ``beta * relevance(s) - (1 - beta) * max_b sim(s, b)`` over the sources
    not yet chosen, with ``sim = 1 / max(euclidean distance, epsilon)``.
    Ties go to the lowest source index.  The recorded score of the first
    pick is ``beta * relevance``.
    """
    relevance = np.asarray(relevance, dtype=np.float64)
    n_sources = model.n_sources
    if relevance.shape != (n_sources,):
        raise ValueError("relevance must have one entry per model source")
    if config.n > n_sources:
        raise ValueError(f"cannot select {config.n} of {n_sources} sources")
    beta = config.beta
    X = model.P.T
    chosen = np.zeros(n_sources, dtype=bool)
    max_sim = np.zeros(n_sources)

    first = int(np.argmax(relevance))
    picks = [first]
    scores = [float(beta * relevance[first])]
    chosen[first] = True
    while len(picks) < config.n:
        last = X[picks[-1]]
        dist = np.sqrt(((X - last) ** 2).sum(axis=1))
        np.maximum(max_sim, 1.0 / np.maximum(dist, config.epsilon), out=max_sim)
        mmr = beta * relevance - (1.0 - beta) * max_sim
        mmr[chosen] = -np.inf
        best = int(np.argmax(mmr))
        picks.append(best)
        scores.append(float(mmr[best]))
        chosen[best] = True
    return SelectionResult(picks, scores)
