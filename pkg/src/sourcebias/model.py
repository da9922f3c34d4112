"""Latent factor model: source matrix P (K x |S|) and event matrix Q (K x |E|)."""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


@dataclass(eq=False)
class FactorModel:
    """Dot-product preference scorer ``x(s, e) = P[:, s] . Q[:, e]``.

    Column ``P[:, s]`` is the embedding of source ``s`` and ``Q[:, e]`` the
    embedding of event ``e``.  Scores are unbounded reals.
    """

    P: np.ndarray
    Q: np.ndarray
    source_names: tuple[str, ...] | None = None
    event_ids: tuple[str, ...] | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.P = np.asarray(self.P, dtype=np.float64)
        self.Q = np.asarray(self.Q, dtype=np.float64)
        if self.P.ndim != 2 or self.Q.ndim != 2 or self.P.shape[0] != self.Q.shape[0]:
            raise ValueError("P and Q must be 2-D with the same number of rows")
        if not (np.isfinite(self.P).all() and np.isfinite(self.Q).all()):
            raise ValueError("factor matrices contain non-finite entries")
        if self.source_names is not None and len(self.source_names) != self.n_sources:
            raise ValueError("source_names length does not match P")
        if self.event_ids is not None and len(self.event_ids) != self.n_events:
            raise ValueError("event_ids length does not match Q")

    @property
    def K(self) -> int:
        return self.P.shape[0]

    @property
    def n_sources(self) -> int:
        return self.P.shape[1]

    @property
    def n_events(self) -> int:
        return self.Q.shape[1]

    def _check(self, s, e):
        s = np.asarray(s)
        e = np.asarray(e)
        if np.any((s < 0) | (s >= self.n_sources)):
            raise IndexError("source index out of range")
        if np.any((e < 0) | (e >= self.n_events)):
            raise IndexError("event index out of range")
        return s, e

    def score(self, source_index, event_index):
        """Raw score for one pair, or element-wise for broadcastable index arrays."""
        s, e = self._check(source_index, event_index)
        out = np.einsum("k...,k...->...", self.P[:, s], self.Q[:, e])
        return float(out) if out.ndim == 0 else out

    __call__ = score

    def score_triplet(self, source_index, pos_event, neg_event):
        s, _ = self._check(source_index, pos_event)
        self._check(source_index, neg_event)
        diff = self.Q[:, pos_event] - self.Q[:, neg_event]
        out = np.einsum("k...,k...->...", self.P[:, s], diff)
        return float(out) if out.ndim == 0 else out

    def copy(self) -> "FactorModel":
        return FactorModel(self.P.copy(), self.Q.copy(), self.source_names, self.event_ids, dict(self.meta))


def init_model(num_sources: int, num_events: int, K: int = 20, seed=None,
               scale: float = 0.1) -> FactorModel:
    """Gaussian N(0, scale**2) initialization, reproducible from ``seed``."""
    if num_sources < 1 or num_events < 1 or K < 1:
        raise ValueError("model dimensions must be positive")
    if not scale > 0:
        raise ValueError("scale must be positive")
    rng = np.random.default_rng(seed)
    P = rng.normal(0.0, scale, size=(K, num_sources))
    Q = rng.normal(0.0, scale, size=(K, num_events))
    return FactorModel(P, Q)


def score(model: FactorModel, source_index, event_index):
    return model.score(source_index, event_index)


def score_triplet(model: FactorModel, source_index, pos_event, neg_event):
    return model.score_triplet(source_index, pos_event, neg_event)


def save_model(model: FactorModel, directory: str | Path):
    """Write ``model.json`` plus column-major little-endian float64 blobs."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    header = {
        "K": model.K,
        "n_sources": model.n_sources,
        "n_events": model.n_events,
        "dtype": "<f8",
        "order": "column-major",
        **model.meta,
    }
    (d / "model.json").write_bytes((json.dumps(header, indent=2, sort_keys=True) + "\n").encode())
    (d / "P.bin").write_bytes(model.P.astype("<f8").tobytes(order="F"))
    (d / "Q.bin").write_bytes(model.Q.astype("<f8").tobytes(order="F"))
    if model.source_names is not None:
        (d / "sources.tsv").write_bytes("".join(f"{i}\t{n}\n" for i, n in enumerate(model.source_names)).encode())
    if model.event_ids is not None:
        (d / "events.tsv").write_bytes("".join(f"{i}\t{n}\n" for i, n in enumerate(model.event_ids)).encode())


def load_model(directory: str | Path) -> FactorModel:
    from .ingest import _read_index

    d = Path(directory)
    for name in ("model.json", "P.bin", "Q.bin"):
        if not (d / name).is_file():
            raise FileNotFoundError(f"missing model file: {d / name}")
    header = json.loads((d / "model.json").read_text())
    K, S, E = header["K"], header["n_sources"], header["n_events"]
    P = np.frombuffer((d / "P.bin").read_bytes(), dtype="<f8").reshape((K, S), order="F")
    Q = np.frombuffer((d / "Q.bin").read_bytes(), dtype="<f8").reshape((K, E), order="F")
    meta = {k: v for k, v in header.items() if k not in ("K", "n_sources", "n_events", "dtype", "order")}
    names = _read_index(d / "sources.tsv") if (d / "sources.tsv").is_file() else None
    events = _read_index(d / "events.tsv") if (d / "events.tsv").is_file() else None
    return FactorModel(P.copy(), Q.copy(), names, events, meta)


def export_embeddings_csv(model: FactorModel, path: str | Path):
    """One row per source: name followed by its K coordinates."""
    names = model.source_names or tuple(str(i) for i in range(model.n_sources))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["source"] + [f"f{k}" for k in range(model.K)])
        for i, name in enumerate(names):
            w.writerow([name] + [repr(float(v)) for v in model.P[:, i]])
