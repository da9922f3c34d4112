"""Embedding diagnostics: pairwise source distances and cross-week stability."""
from __future__ import annotations

import csv
import itertools
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np
from scipy.spatial.distance import pdist

from .model import FactorModel


def pairwise_distances(model: FactorModel, source_subset: Sequence[int]) -> np.ndarray:
    """Condensed Euclidean distances for pairs (i, j), i < j, in subset order."""
    idx = np.asarray(source_subset, dtype=np.int64)
    if idx.size < 2:
        raise ValueError("need at least two sources")
    return pdist(model.P[:, idx].T, metric="euclidean")


def pearson(a, b) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.size < 2:
        raise ValueError("vectors must have equal length >= 2")
    da = a - a.mean()
    db = b - b.mean()
    na, nb = np.linalg.norm(da), np.linalg.norm(db)
    if na == 0 or nb == 0:
        raise ValueError("correlation undefined for a constant vector")
    return float(np.clip((da / na) @ (db / nb), -1.0, 1.0))


def common_top_sources(model_a: FactorModel, model_b: FactorModel,
                       activity_a: Mapping[str, float] | None = None,
                       activity_b: Mapping[str, float] | None = None,
                       top_m: int | None = 1000) -> list[str]:
    """Source names present in both models, most active first.

    Activity is summed over the two weeks; without activity the common names
    are returned in lexicographic order.  Ties are broken by name.
    """
    if model_a.source_names is None or model_b.source_names is None:
        raise ValueError("models must carry source names")
    common = sorted(set(model_a.source_names) & set(model_b.source_names))
    if activity_a is not None and activity_b is not None:
        common.sort(key=lambda n: -(activity_a.get(n, 0) + activity_b.get(n, 0)))
    if top_m is not None:
        common = common[:top_m]
    return common


def cross_week_correlation(model_a: FactorModel, model_b: FactorModel,
                           common_source_names: Sequence[str] | None = None,
                           top_m_by_activity: int | None = None,
                           activity_a=None, activity_b=None) -> float:
    """Pearson correlation of the pairwise distances of shared sources."""
    names = list(common_source_names) if common_source_names is not None else \
        common_top_sources(model_a, model_b, activity_a, activity_b, top_m_by_activity)
    if top_m_by_activity is not None:
        names = names[:top_m_by_activity]
    if len(names) < 2:
        raise ValueError("need at least two common sources")
    pos_a = {n: i for i, n in enumerate(model_a.source_names)}
    pos_b = {n: i for i, n in enumerate(model_b.source_names)}
    da = pairwise_distances(model_a, [pos_a[n] for n in names])
    db = pairwise_distances(model_b, [pos_b[n] for n in names])
    return pearson(da, db)


def correlation_summary(models: Sequence[FactorModel], activities=None, top_m: int | None = 1000) -> dict:
    """Correlation for every pair of weeks plus all-pairs and consecutive means."""
    pairs = {}
    for a, b in itertools.combinations(range(len(models)), 2):
        act_a = activities[a] if activities else None
        act_b = activities[b] if activities else None
        pairs[(a, b)] = cross_week_correlation(models[a], models[b], None, top_m, act_a, act_b)
    consecutive = [pairs[(i, i + 1)] for i in range(len(models) - 1)]
    return {
        "pairs": [{"a": a, "b": b, "pearson": r} for (a, b), r in pairs.items()],
        "mean_all_pairs": float(np.mean(list(pairs.values()))) if pairs else None,
        "mean_consecutive": float(np.mean(consecutive)) if consecutive else None,
    }


def write_distances_csv(model: FactorModel, source_subset: Sequence[int], path: str | Path):
    names = model.source_names or tuple(str(i) for i in range(model.n_sources))
    idx = list(source_subset)
    dist = pairwise_distances(model, idx)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["source_a", "source_b", "distance"])
        for (i, j), d in zip(itertools.combinations(idx, 2), dist):
            w.writerow([names[i], names[j], repr(float(d))])
