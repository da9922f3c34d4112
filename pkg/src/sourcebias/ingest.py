"""Mention parsing, interaction-matrix construction and leave-one-out splits.

Input files follow either the GDELT v2 mentions column layout or a simple
three-column ``event_id<TAB>source_name<TAB>timestamp`` layout.  Datasets and
splits round-trip through plain TSV/JSON directories.
"""
from __future__ import annotations

import io
import json
import logging
import warnings
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import IO, Iterable, Iterator, Sequence

import numpy as np

_logger = logging.getLogger(__name__)

DAY = timedelta(days=1)


class DataError(ValueError):
    """Raised for malformed input data or datasets that cannot be built."""


class EmptyDatasetError(DataError):
    pass


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MentionRecord:
    event_id: str
    source_name: str
    mention_time: datetime

    def __post_init__(self):
        if not self.event_id or not self.source_name:
            raise DataError("event_id and source_name must be non-empty")
        if self.mention_time.tzinfo is None:
            raise DataError("mention_time must be timezone-aware")


@dataclass(frozen=True)
class MentionFormat:
    """Column positions of the fields we need in a tab-separated line.

    ``time_format`` is a ``strptime`` pattern, or ``None`` for ISO 8601.
    """

    event_col: int
    source_col: int
    time_col: int
    time_format: str | None

    @property
    def min_fields(self) -> int:
        return max(self.event_col, self.source_col, self.time_col) + 1


GDELT_MENTIONS = MentionFormat(event_col=0, source_col=4, time_col=2, time_format="%Y%m%d%H%M%S")
SIMPLE = MentionFormat(event_col=0, source_col=1, time_col=2, time_format=None)
FORMATS = {"gdelt": GDELT_MENTIONS, "simple": SIMPLE}


@dataclass
class ParseResult:
    records: list[MentionRecord]
    skipped: int = 0

    def __len__(self):
        return len(self.records)

    def __iter__(self) -> Iterator[MentionRecord]:
        return iter(self.records)


def parse_time(text: str, time_format: str | None = None) -> datetime:
    """Parse a timestamp into an aware UTC datetime truncated to seconds."""
    text = text.strip()
    if time_format is None:
        ts = datetime.fromisoformat(text.replace("Z", "+00:00"))
    else:
        ts = datetime.strptime(text, time_format)
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc).replace(microsecond=0)


def format_time(ts: datetime) -> str:
    return ts.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def parse_mentions(
    stream: IO[bytes] | IO[str] | Iterable[bytes | str],
    fmt: MentionFormat = GDELT_MENTIONS,
    strict: bool = False,
) -> ParseResult:
    """Parse tab-separated mention lines into records, in file order.

    Malformed lines (too few fields, empty ids, bad timestamps) are counted in
    ``ParseResult.skipped`` and dropped, or raise :class:`DataError` when
    ``strict`` is set.  Blank lines are always skipped and counted.
    """
    records: list[MentionRecord] = []
    skipped = 0
    for lineno, raw in enumerate(stream, start=1):
        line = raw.decode("utf-8", errors="replace") if isinstance(raw, bytes) else raw
        line = line.rstrip("\r\n")
        if not line.strip():
            skipped += 1
            continue
        fields = line.split("\t")
        try:
            if len(fields) < fmt.min_fields:
                raise DataError(f"expected at least {fmt.min_fields} fields, got {len(fields)}")
            record = MentionRecord(
                event_id=fields[fmt.event_col].strip(),
                source_name=fields[fmt.source_col].strip(),
                mention_time=parse_time(fields[fmt.time_col], fmt.time_format),
            )
        except ValueError as exc:
            if strict:
                raise DataError(f"line {lineno}: {exc}") from exc
            skipped += 1
            continue
        records.append(record)
    if skipped:
        _logger.info("skipped %d malformed lines", skipped)
    return ParseResult(records, skipped)


def read_mentions(paths: Sequence[str | Path], fmt: MentionFormat = GDELT_MENTIONS,
                  strict: bool = False) -> ParseResult:
    out = ParseResult([], 0)
    for path in paths:
        with open(path, "rb") as fh:
            part = parse_mentions(fh, fmt, strict)
        out.records.extend(part.records)
        out.skipped += part.skipped
    return out


# ---------------------------------------------------------------------------
# Dataset
# ---------------------------------------------------------------------------


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class InteractionDataset:
    """Binary one-class source x event matrix with first-mention times.

    Interactions are stored as parallel arrays sorted by (source, event).
    Times are integer seconds since the Unix epoch; ``window`` is the half
    open interval ``[start, end)``.
    """

    sources: tuple[str, ...]
    events: tuple[str, ...]
    source_idx: np.ndarray
    event_idx: np.ndarray
    times: np.ndarray
    window: tuple[datetime, datetime]
    min_events: int = 1
    min_sources: int = 1
    stats: dict = field(default_factory=dict)

    def __post_init__(self):
        s = np.asarray(self.source_idx, dtype=np.int64)
        e = np.asarray(self.event_idx, dtype=np.int64)
        t = np.asarray(self.times, dtype=np.int64)
        if not (s.shape == e.shape == t.shape) or s.ndim != 1:
            raise DataError("interaction arrays must be 1-D and of equal length")
        order = np.lexsort((e, s))
        s, e, t = s[order], e[order], t[order]
        if len(s):
            if s.min() < 0 or s.max() >= len(self.sources) or e.min() < 0 or e.max() >= len(self.events):
                raise DataError("interaction index out of range")
            codes = s * len(self.events) + e
            if np.any(codes[1:] == codes[:-1]):
                raise DataError("duplicate (source, event) interaction")
            lo, hi = (int(w.timestamp()) for w in self.window)
            if t.min() < lo or t.max() >= hi:
                raise DataError("interaction time outside window")
        object.__setattr__(self, "source_idx", _readonly(s))
        object.__setattr__(self, "event_idx", _readonly(e))
        object.__setattr__(self, "times", _readonly(t))

    @property
    def n_sources(self) -> int:
        return len(self.sources)

    @property
    def n_events(self) -> int:
        return len(self.events)

    @property
    def n_interactions(self) -> int:
        return len(self.source_idx)

    def source_degrees(self) -> np.ndarray:
        return np.bincount(self.source_idx, minlength=self.n_sources)

    def event_degrees(self) -> np.ndarray:
        return np.bincount(self.event_idx, minlength=self.n_events)

    def codes(self) -> np.ndarray:
        """Sorted flat ``source * n_events + event`` codes of all interactions."""
        return self.source_idx * self.n_events + self.event_idx

    def contains(self, sources, events) -> np.ndarray:
        codes = self.codes()
        query = np.asarray(sources, dtype=np.int64) * self.n_events + np.asarray(events, dtype=np.int64)
        pos = np.searchsorted(codes, query)
        pos = np.minimum(pos, max(len(codes) - 1, 0))
        return (codes[pos] == query) if len(codes) else np.zeros(query.shape, bool)

    def to_dense(self) -> np.ndarray:
        R = np.zeros((self.n_sources, self.n_events), dtype=bool)
        R[self.source_idx, self.event_idx] = True
        return R

    def to_sparse(self):
        from scipy import sparse

        data = np.ones(self.n_interactions, dtype=np.float64)
        return sparse.csr_matrix((data, (self.source_idx, self.event_idx)),
                                 shape=(self.n_sources, self.n_events))

    def event_sets(self) -> list[np.ndarray]:
        """Covered event indices per source."""
        bounds = np.searchsorted(self.source_idx, np.arange(self.n_sources + 1))
        return [self.event_idx[bounds[i]:bounds[i + 1]] for i in range(self.n_sources)]

    def to_records(self) -> list[MentionRecord]:
        return [
            MentionRecord(self.events[e], self.sources[s], datetime.fromtimestamp(int(t), timezone.utc))
            for s, e, t in zip(self.source_idx, self.event_idx, self.times)
        ]

    def without(self, mask: np.ndarray) -> "InteractionDataset":
        """Copy with the interactions selected by ``mask`` removed; indexing kept."""
        keep = ~np.asarray(mask, bool)
        return InteractionDataset(
            self.sources, self.events, self.source_idx[keep], self.event_idx[keep],
            self.times[keep], self.window, self.min_events, self.min_sources, dict(self.stats),
        )


def _filter_fixpoint(s: np.ndarray, e: np.ndarray, min_events: int, min_sources: int,
                     n_s: int, n_e: int) -> np.ndarray:
    keep = np.ones(len(s), dtype=bool)
    while True:
        sdeg = np.bincount(s[keep], minlength=n_s)
        edeg = np.bincount(e[keep], minlength=n_e)
        drop = keep & ((sdeg[s] < min_events) | (edeg[e] < min_sources))
        if not drop.any():
            return keep
        keep &= ~drop


def build_dataset(
    records: Iterable[MentionRecord],
    window: tuple[datetime, datetime],
    min_events: int = 5,
    min_sources: int = 5,
    parse_skipped: int = 0,
) -> InteractionDataset:
    """Build the filtered interaction dataset from mention records.

    Records outside ``[start, end)`` are dropped, repeated (source, event)
    mentions collapse to the earliest one, and the low-count filter is
    repeated until every source covers at least ``min_events`` events and
    every event is covered by at least ``min_sources`` sources.
    """
    if min_events < 1 or min_sources < 1:
        raise ValueError("min_events and min_sources must be >= 1")
    start, end = window
    if not start < end:
        raise ValueError("window must be non-empty")
    lo, hi = int(start.timestamp()), int(end.timestamp())

    first: dict[tuple[str, str], int] = {}
    n_in = n_outside = 0
    for rec in records:
        n_in += 1
        t = int(rec.mention_time.timestamp())
        if not lo <= t < hi:
            n_outside += 1
            continue
        key = (rec.source_name, rec.event_id)
        prev = first.get(key)
        if prev is None or t < prev:
            first[key] = t
    n_dupes = n_in - n_outside - len(first)

    src_names = sorted({k[0] for k in first})
    evt_ids = sorted({k[1] for k in first})
    s_of = {n: i for i, n in enumerate(src_names)}
    e_of = {n: i for i, n in enumerate(evt_ids)}
    s = np.fromiter((s_of[k[0]] for k in first), dtype=np.int64, count=len(first))
    e = np.fromiter((e_of[k[1]] for k in first), dtype=np.int64, count=len(first))
    t = np.fromiter(first.values(), dtype=np.int64, count=len(first))

    keep = _filter_fixpoint(s, e, min_events, min_sources, len(src_names), len(evt_ids))
    if not keep.any():
        raise EmptyDatasetError("empty dataset after filtering")
    s, e, t = s[keep], e[keep], t[keep]

    used_s = np.unique(s)
    used_e = np.unique(e)
    # unique() is sorted, so the remap preserves lexicographic order
    s_new = np.searchsorted(used_s, s)
    e_new = np.searchsorted(used_e, e)

    stats = {
        "records": n_in,
        "outside_window": n_outside,
        "duplicates": n_dupes,
        "parse_skipped": parse_skipped,
        "removed_sources": len(src_names) - len(used_s),
        "removed_events": len(evt_ids) - len(used_e),
    }
    return InteractionDataset(
        sources=tuple(src_names[i] for i in used_s),
        events=tuple(evt_ids[i] for i in used_e),
        source_idx=s_new,
        event_idx=e_new,
        times=t,
        window=(start.astimezone(timezone.utc), end.astimezone(timezone.utc)),
        min_events=min_events,
        min_sources=min_sources,
        stats=stats,
    )


# ---------------------------------------------------------------------------
# Leave-one-out split
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class EvalSet:
    """Held-out (source, positive, negative) triplets, at most one per source."""

    sources: np.ndarray
    positives: np.ndarray
    negatives: np.ndarray
    seed: int | None = None

    def __post_init__(self):
        for name in ("sources", "positives", "negatives"):
            object.__setattr__(self, name, _readonly(np.asarray(getattr(self, name), dtype=np.int64)))
        if not (self.sources.shape == self.positives.shape == self.negatives.shape):
            raise ValueError("triplet arrays must have equal length")
        if len(np.unique(self.sources)) != len(self.sources):
            raise ValueError("at most one triplet per source")

    def __len__(self):
        return len(self.sources)

    def triplets(self) -> list[tuple[int, int, int]]:
        return list(zip(self.sources.tolist(), self.positives.tolist(), self.negatives.tolist()))


@dataclass(frozen=True, eq=False)
class SplitPair:
    train: InteractionDataset
    eval_set: EvalSet
    seed: int
    holdout_window: tuple[datetime, datetime]
    skipped_sources: int = 0


def last_day(window: tuple[datetime, datetime]) -> tuple[datetime, datetime]:
    start, end = window
    return (max(start, end - DAY), end)


def split_leave_one_out(
    dataset: InteractionDataset,
    holdout_window: tuple[datetime, datetime] | None = None,
    seed: int = 0,
) -> SplitPair:
    """Hold out one random last-day interaction per source and pair it with a negative.

    ``holdout_window`` defaults to the final 24 hours of ``dataset.window``.
    Sources whose only interaction falls in the holdout window are skipped
    and counted in ``SplitPair.skipped_sources``.
    """
    if holdout_window is None:
        holdout_window = last_day(dataset.window)
    h0, h1 = holdout_window
    w0, w1 = dataset.window
    if not (w0 <= h0 < h1 <= w1):
        raise ValueError("holdout window must lie inside the dataset window")
    lo, hi = int(h0.timestamp()), int(h1.timestamp())

    rng = np.random.default_rng(seed)
    in_holdout = (dataset.times >= lo) & (dataset.times < hi)
    degrees = dataset.source_degrees()
    bounds = np.searchsorted(dataset.source_idx, np.arange(dataset.n_sources + 1))
    held = np.zeros(dataset.n_interactions, dtype=bool)
    srcs, pos, neg = [], [], []
    skipped = 0
    for s in range(dataset.n_sources):
        a, b = bounds[s], bounds[s + 1]
        candidates = np.flatnonzero(in_holdout[a:b]) + a
        if len(candidates) == 0:
            continue
        if degrees[s] < 2 or degrees[s] >= dataset.n_events:
            skipped += 1
            continue
        k = candidates[rng.integers(len(candidates))]
        covered = dataset.event_idx[a:b]
        uncovered = np.setdiff1d(np.arange(dataset.n_events), covered, assume_unique=True)
        held[k] = True
        srcs.append(s)
        pos.append(int(dataset.event_idx[k]))
        neg.append(int(uncovered[rng.integers(len(uncovered))]))
    if skipped:
        _logger.info("skipped %d sources that cannot be held out", skipped)
    if not srcs:
        warnings.warn("no interactions inside the holdout window; eval set is empty", stacklevel=2)
    train = dataset.without(held)
    return SplitPair(train, EvalSet(srcs, pos, neg, seed), seed, (h0, h1), skipped)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def _write_text(path: Path, text: str):
    path.write_bytes(text.encode("utf-8"))


def save_dataset(dataset: InteractionDataset, directory: str | Path):
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    _write_text(d / "sources.tsv", "".join(f"{i}\t{n}\n" for i, n in enumerate(dataset.sources)))
    _write_text(d / "events.tsv", "".join(f"{i}\t{n}\n" for i, n in enumerate(dataset.events)))
    buf = io.StringIO()
    for s, e, t in zip(dataset.source_idx.tolist(), dataset.event_idx.tolist(), dataset.times.tolist()):
        buf.write(f"{s}\t{e}\t{format_time(datetime.fromtimestamp(t, timezone.utc))}\n")
    _write_text(d / "interactions.tsv", buf.getvalue())
    meta = {
        "window": [format_time(w) for w in dataset.window],
        "thresholds": {"min_events": dataset.min_events, "min_sources": dataset.min_sources},
        "counts": {
            "sources": dataset.n_sources,
            "events": dataset.n_events,
            "interactions": dataset.n_interactions,
        },
        "skipped": dataset.stats,
    }
    _write_text(d / "meta.json", json.dumps(meta, indent=2, sort_keys=True) + "\n")


def _read_index(path: Path) -> tuple[str, ...]:
    names = []
    with open(path, encoding="utf-8") as fh:
        for i, line in enumerate(fh):
            idx, name = line.rstrip("\n").split("\t", 1)
            if int(idx) != i:
                raise DataError(f"{path}: non-dense index at line {i + 1}")
            names.append(name)
    return tuple(names)


def load_dataset(directory: str | Path) -> InteractionDataset:
    d = Path(directory)
    for name in ("sources.tsv", "events.tsv", "interactions.tsv", "meta.json"):
        if not (d / name).is_file():
            raise FileNotFoundError(f"missing dataset file: {d / name}")
    meta = json.loads((d / "meta.json").read_text())
    rows = [line.split("\t") for line in (d / "interactions.tsv").read_text().splitlines() if line]
    s = np.array([int(r[0]) for r in rows], dtype=np.int64)
    e = np.array([int(r[1]) for r in rows], dtype=np.int64)
    t = np.array([int(parse_time(r[2]).timestamp()) for r in rows], dtype=np.int64)
    return InteractionDataset(
        sources=_read_index(d / "sources.tsv"),
        events=_read_index(d / "events.tsv"),
        source_idx=s, event_idx=e, times=t,
        window=tuple(parse_time(w) for w in meta["window"]),
        min_events=meta["thresholds"]["min_events"],
        min_sources=meta["thresholds"]["min_sources"],
        stats=meta.get("skipped", {}),
    )


def save_split(split: SplitPair, directory: str | Path):
    d = Path(directory)
    save_dataset(split.train, d / "train")
    ev = split.eval_set
    _write_text(d / "eval.tsv", "".join(f"{s}\t{p}\t{n}\n" for s, p, n in ev.triplets()))
    meta = {
        "seed": split.seed,
        "holdout_window": [format_time(w) for w in split.holdout_window],
        "eval_size": len(ev),
        "skipped_sources": split.skipped_sources,
    }
    _write_text(d / "split.json", json.dumps(meta, indent=2, sort_keys=True) + "\n")


def load_split(directory: str | Path) -> SplitPair:
    d = Path(directory)
    for name in ("split.json", "eval.tsv"):
        if not (d / name).is_file():
            raise FileNotFoundError(f"missing split file: {d / name}")
    meta = json.loads((d / "split.json").read_text())
    rows = [tuple(map(int, line.split("\t"))) for line in (d / "eval.tsv").read_text().splitlines() if line]
    arr = np.array(rows, dtype=np.int64).reshape(-1, 3)
    ev = EvalSet(arr[:, 0], arr[:, 1], arr[:, 2], meta["seed"])
    return SplitPair(
        train=load_dataset(d / "train"),
        eval_set=ev,
        seed=meta["seed"],
        holdout_window=tuple(parse_time(w) for w in meta["holdout_window"]),
        skipped_sources=meta.get("skipped_sources", 0),
    )
