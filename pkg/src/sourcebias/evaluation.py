"""Leave-one-out AUC for any (source, event) -> score callable."""
from __future__ import annotations

import math

import numpy as np

from .ingest import EvalSet


def triplet_credit(pos_scores, neg_scores) -> np.ndarray:
    """1 for a win, 0.5 for an exact tie, 0 for a loss."""
    pos_scores = np.asarray(pos_scores, dtype=np.float64)
    neg_scores = np.asarray(neg_scores, dtype=np.float64)
    return np.where(pos_scores > neg_scores, 1.0, np.where(pos_scores == neg_scores, 0.5, 0.0))


def auc_report(scorer, eval_set: EvalSet) -> dict:
    if len(eval_set) == 0:
        raise ValueError("eval set is empty")
    pos = np.asarray(scorer(eval_set.sources, eval_set.positives), dtype=np.float64)
    neg = np.asarray(scorer(eval_set.sources, eval_set.negatives), dtype=np.float64)
    credit = triplet_credit(pos, neg)
    return {
        "auc": math.fsum(credit.tolist()) / len(credit),
        "n": len(credit),
        "ties": int(np.count_nonzero(pos == neg)),
    }


def auc(scorer, eval_set: EvalSet) -> float:
    """Fraction of held-out triplets ranked correctly, ties counting one half.

    ``scorer(sources, events)`` must accept index arrays and return scores of
    the same shape.
    """
    return auc_report(scorer, eval_set)["auc"]
