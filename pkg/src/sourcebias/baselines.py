"""Non-latent comparison scorers: event popularity and source kNN."""
from __future__ import annotations

import warnings

import numpy as np

from .ingest import InteractionDataset


class PopularityScorer:
    """Score an event by how many training sources covered it."""

    def __init__(self, train: InteractionDataset):
        if train.n_interactions == 0:
            raise ValueError("empty training data")
        self.counts = train.event_degrees().astype(np.float64)

    def __call__(self, source_index, event_index):
        return self.counts[event_index]


def popularity_scorer(train: InteractionDataset) -> PopularityScorer:
    return PopularityScorer(train)


def jaccard_distance(a, b) -> float:
    a, b = set(a), set(b)
    union = len(a | b)
    if union == 0:
        return 0.0
    return 1.0 - len(a & b) / union


class KNNScorer:
    """Similarity-weighted vote of each source's ``k`` nearest Jaccard neighbors.

    ``score(s, e) = sum(1 - d(s, n) for n in neighbors(s) if n covered e)``.
    Neighbor ties are broken by ascending source index.
    """

    def __init__(self, train: InteractionDataset, k: int = 10, block: int = 512):
        if k < 1:
            raise ValueError("k must be >= 1")
        if train.n_interactions == 0:
            raise ValueError("empty training data")
        n = train.n_sources
        if n - 1 < k:
            warnings.warn(f"only {n - 1} other sources available for k={k}", stacklevel=2)
        k_eff = min(k, n - 1)
        R = train.to_sparse()
        deg = np.asarray(R.sum(axis=1)).ravel()
        self.neighbors = np.zeros((n, k_eff), dtype=np.int64)
        self.weights = np.zeros((n, k_eff))
        idx = np.arange(n)
        for lo in range(0, n, block):
            hi = min(lo + block, n)
            inter = (R[lo:hi] @ R.T).toarray()
            union = deg[lo:hi, None] + deg[None, :] - inter
            with np.errstate(invalid="ignore", divide="ignore"):
                sim = np.where(union > 0, inter / union, 1.0)
            dist = 1.0 - sim
            for r in range(hi - lo):
                s = lo + r
                d = dist[r].copy()
                d[s] = np.inf
                order = np.lexsort((idx, d))[:k_eff]
                self.neighbors[s] = order
                self.weights[s] = 1.0 - dist[r, order]
        self._train = train

    def __call__(self, source_index, event_index):
        s, e = np.broadcast_arrays(np.asarray(source_index, dtype=np.int64),
                                   np.asarray(event_index, dtype=np.int64))
        nb = self.neighbors[s]
        hit = self._train.contains(nb, e[..., None])
        out = (self.weights[s] * hit).sum(axis=-1)
        return float(out) if out.ndim == 0 else out


def knn_scorer(train: InteractionDataset, k: int = 10) -> KNNScorer:
    return KNNScorer(train, k)
