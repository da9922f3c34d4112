"""Stochastic BPR training of the factor model."""
from __future__ import annotations

import json
import logging
import math
import time
from dataclasses import dataclass, asdict
from typing import Callable, NamedTuple

import numpy as np
from numba import njit
from scipy.special import expit, log_expit

from .ingest import InteractionDataset
from .model import FactorModel, init_model

_logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainConfig:
    alpha: float = 0.1
    lam: float = 0.01
    K: int = 20
    epochs: int = 50
    seed: int = 0
    init_scale: float = 0.1
    probe_size: int = 1000

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("alpha must be > 0")
        if not self.lam >= 0:
            raise ValueError("lambda must be >= 0")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.K < 1:
            raise ValueError("K must be >= 1")


class Triplet(NamedTuple):
    source: int
    pos: int
    neg: int


class TripletSampler:
    """Uniform (source, positive) draws with rejection-sampled negatives."""

    def __init__(self, train: InteractionDataset):
        if train.n_interactions == 0:
            raise ValueError("cannot sample from an empty dataset")
        self.train = train
        self._saturated = train.source_degrees() >= train.n_events

    def sample(self, rng: np.random.Generator, n: int):
        tr = self.train
        k = rng.integers(0, tr.n_interactions, size=n)
        s = tr.source_idx[k]
        if self._saturated[s].any():
            bad = int(s[self._saturated[s]][0])
            raise ValueError(f"source {bad} covers every event; cannot sample a negative")
        pos = tr.event_idx[k]
        neg = rng.integers(0, tr.n_events, size=n)
        redo = tr.contains(s, neg)
        while redo.any():
            idx = np.flatnonzero(redo)
            neg[idx] = rng.integers(0, tr.n_events, size=len(idx))
            redo[idx] = tr.contains(s[idx], neg[idx])
        return s, pos, neg


def sample_triplet(train: InteractionDataset, rng: np.random.Generator) -> Triplet:
    s, p, n = TripletSampler(train).sample(rng, 1)
    return Triplet(int(s[0]), int(p[0]), int(n[0]))


def bpr_step(model: FactorModel, triplet, alpha: float, lam: float):
    """One in-place ascent step on ``ln sigmoid(x) - lam/2 * ||theta||^2``."""
    s, i, j = triplet
    P, Q = model.P, model.Q
    p = P[:, s].copy()
    qi = Q[:, i].copy()
    qj = Q[:, j].copy()
    g = expit(-(p @ (qi - qj)))
    P[:, s] = p + alpha * (g * (qi - qj) - lam * p)
    Q[:, i] = qi + alpha * (g * p - lam * qi)
    Q[:, j] = qj + alpha * (-g * p - lam * qj)


@njit(cache=True)
def _sgd_pass(P, Q, src, pos, neg, alpha, lam):
    K = P.shape[0]
    p = np.empty(K)
    qi = np.empty(K)
    qj = np.empty(K)
    for t in range(src.shape[0]):
        s, i, j = src[t], pos[t], neg[t]
        x = 0.0
        for k in range(K):
            p[k] = P[k, s]
            qi[k] = Q[k, i]
            qj[k] = Q[k, j]
        for k in range(K):
            x += p[k] * (qi[k] - qj[k])
        if x >= 0:
            z = math.exp(-x)
            g = z / (1.0 + z)
        else:
            g = 1.0 / (1.0 + math.exp(x))
        for k in range(K):
            P[k, s] = p[k] + alpha * (g * (qi[k] - qj[k]) - lam * p[k])
            Q[k, i] = qi[k] + alpha * (g * p[k] - lam * qi[k])
            Q[k, j] = qj[k] + alpha * (-g * p[k] - lam * qj[k])


def sgd_pass(model: FactorModel, sources, positives, negatives, alpha: float, lam: float):
    """Apply :func:`bpr_step` sequentially for each triplet (compiled)."""
    _sgd_pass(model.P, model.Q,
              np.ascontiguousarray(sources, dtype=np.int64),
              np.ascontiguousarray(positives, dtype=np.int64),
              np.ascontiguousarray(negatives, dtype=np.int64),
              float(alpha), float(lam))


def probe_objective(model: FactorModel, sources, positives, negatives) -> tuple[float, float]:
    """Mean ``ln sigmoid(x)`` and mean ``sigmoid(x)`` over probe triplets."""
    x = model.score_triplet(np.asarray(sources), np.asarray(positives), np.asarray(negatives))
    return float(np.mean(log_expit(x))), float(np.mean(expit(x)))


def train(
    dataset: InteractionDataset,
    config: TrainConfig = TrainConfig(),
    probe=None,
    on_epoch: Callable[[dict], None] | None = None,
) -> FactorModel:
    """Fit a factor model with ``config.epochs`` passes of BPR-SGD.

    Each epoch draws ``dataset.n_interactions`` fresh triplets.  ``probe`` is
    an optional (sources, positives, negatives) triple used for the per-epoch
    diagnostics; by default a fixed sample of training triplets is used.
    ``on_epoch`` receives a dict per epoch (epoch 0 is the initial model).
    """
    seeds = np.random.SeedSequence(config.seed).spawn(3)
    model = init_model(dataset.n_sources, dataset.n_events, config.K, seeds[0], config.init_scale)
    model.source_names = dataset.sources
    model.event_ids = dataset.events
    sampler = TripletSampler(dataset)
    if probe is None:
        probe = sampler.sample(np.random.default_rng(seeds[1]), config.probe_size)
    rng = np.random.default_rng(seeds[2])

    def report(epoch, t0):
        obj, mean_sig = probe_objective(model, *probe)
        rec = {"epoch": epoch, "probe_log_sigmoid": obj, "probe_sigmoid": mean_sig,
               "wall_time": time.perf_counter() - t0}
        _logger.debug("epoch %d probe ln-sigmoid %.5f", epoch, obj)
        if on_epoch is not None:
            on_epoch(rec)

    t0 = time.perf_counter()
    report(0, t0)
    for epoch in range(1, config.epochs + 1):
        s, i, j = sampler.sample(rng, dataset.n_interactions)
        sgd_pass(model, s, i, j, config.alpha, config.lam)
        report(epoch, t0)
    if not (np.isfinite(model.P).all() and np.isfinite(model.Q).all()):
        raise FloatingPointError("training diverged")
    model.meta = {"seed": config.seed, "hyperparameters": asdict(config)}
    return model


def jsonl_logger(fh) -> Callable[[dict], None]:
    def write(rec):
        fh.write(json.dumps(rec) + "\n")
        fh.flush()
    return write
