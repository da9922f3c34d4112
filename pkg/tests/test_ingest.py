import io
import warnings
from datetime import datetime, timedelta, timezone

import numpy as np
import pytest

from sourcebias.ingest import (
    GDELT_MENTIONS,
    SIMPLE,
    DataError,
    EmptyDatasetError,
    build_dataset,
    last_day,
    load_dataset,
    load_split,
    parse_mentions,
    save_dataset,
    save_split,
    split_leave_one_out,
)

from conftest import T0, WINDOW, dataset_from_pairs, rec

GDELT_LINE = (
    "912345678\t20161001113000\t20161001120000\t1\texample.com\t"
    "http://example.com/a\t1\t10\t20\t30\t1\t100\t500\t-1.5\n"
)


class TestParse:
    def test_gdelt_line(self):
        res = parse_mentions(io.BytesIO(GDELT_LINE.encode()))
        assert res.skipped == 0
        (r,) = res.records
        assert r.event_id == "912345678"
        assert r.source_name == "example.com"
        assert r.mention_time == datetime(2016, 10, 1, 12, 0, 0, tzinfo=timezone.utc)

    def test_empty_line_counted(self):
        res = parse_mentions(io.BytesIO(b"\n" + GDELT_LINE.encode()))
        assert len(res) == 1 and res.skipped == 1

    def test_short_line_lenient(self):
        res = parse_mentions(io.BytesIO(b"1\t2\n" + GDELT_LINE.encode()))
        assert GDELT_MENTIONS.min_fields == 5
        assert len(res) == 1 and res.skipped == 1

    def test_short_line_strict(self):
        with pytest.raises(DataError, match="line 1"):
            parse_mentions(io.BytesIO(b"1\t2\n"), strict=True)

    def test_bad_timestamp(self):
        bad = GDELT_LINE.replace("20161001120000", "2016XX01120000")
        assert parse_mentions(io.BytesIO(bad.encode())).skipped == 1
        with pytest.raises(DataError):
            parse_mentions(io.BytesIO(bad.encode()), strict=True)

    def test_simple_layout_and_order(self):
        text = "e2\ta.com\t2016-10-01T10:00:00Z\ne1\tb.com\t2016-10-01T09:00:00\r\n"
        res = parse_mentions(io.StringIO(text), SIMPLE)
        assert [r.event_id for r in res] == ["e2", "e1"]
        assert res.records[1].mention_time.tzinfo is not None

    def test_empty_ids_rejected(self):
        res = parse_mentions(io.StringIO("\ta.com\t2016-10-01T10:00:00Z\n"), SIMPLE)
        assert res.skipped == 1


class TestBuild:
    def test_low_count_source_removed(self):
        recs = [rec(f"e{j}", f"s{i}") for i in range(5) for j in range(5)]
        recs += [rec(f"e{j}", "weak") for j in range(4)]
        ds = build_dataset(recs, WINDOW, 5, 5)
        assert "weak" not in ds.sources
        assert ds.n_sources == 5 and ds.n_interactions == 25

    def test_no_filtering(self):
        ds = dataset_from_pairs([("a", "x"), ("b", "x"), ("a", "y")])
        assert ds.n_interactions == 3
        assert ds.sources == ("a", "b") and ds.events == ("x", "y")

    def test_fixpoint_chain(self):
        core = [rec(f"c{j}", f"s{i}") for i in range(6) for j in range(6)]
        chain = [rec("e", f"s{i}") for i in range(4)] + [rec("e", "x")]
        chain += [rec(f"c{j}", "x") for j in range(3)]
        ds = build_dataset(core + chain, WINDOW, 5, 5)
        assert "x" not in ds.sources
        assert "e" not in ds.events
        assert ds.n_sources == 6 and ds.n_events == 6

    def test_duplicates_collapse_to_earliest(self):
        ds = build_dataset([rec("e", "s", 5), rec("e", "s", 2), rec("e", "s", 9)], WINDOW, 1, 1)
        assert ds.n_interactions == 1
        assert ds.times[0] == int((T0 + timedelta(hours=2)).timestamp())
        assert ds.stats["duplicates"] == 2

    def test_window_filter(self):
        ds = build_dataset([rec("e", "s", -1), rec("f", "s", 1), rec("g", "s", 24 * 7)], WINDOW, 1, 1)
        assert ds.events == ("f",)
        assert ds.stats["outside_window"] == 2

    def test_empty_result(self):
        with pytest.raises(EmptyDatasetError):
            build_dataset([rec("e", "s")], WINDOW, 5, 5)

    def test_bad_thresholds(self):
        with pytest.raises(ValueError):
            build_dataset([rec("e", "s")], WINDOW, 0, 1)
        with pytest.raises(ValueError):
            build_dataset([rec("e", "s")], (T0, T0), 1, 1)

    def test_idempotent(self, planted):
        ds, _ = planted
        again = build_dataset(ds.to_records(), ds.window, ds.min_events, ds.min_sources)
        assert again.sources == ds.sources and again.events == ds.events
        np.testing.assert_array_equal(again.source_idx, ds.source_idx)
        np.testing.assert_array_equal(again.event_idx, ds.event_idx)
        np.testing.assert_array_equal(again.times, ds.times)

    def test_thresholds_hold(self, planted):
        ds, _ = planted
        assert ds.source_degrees().min() >= 5
        assert ds.event_degrees().min() >= 5

    def test_arrays_immutable(self, planted):
        ds, _ = planted
        with pytest.raises(ValueError):
            ds.source_idx[0] = 3


def _last_day_dataset(n_sources=6, n_events=10):
    pairs, hours = [], []
    for i in range(n_sources):
        for j in range(3):
            pairs.append((f"s{i}", f"e{(i + j) % n_events}"))
            hours.append(10.0 if j < 2 else 6.5 * 24)
    for j in range(n_events):
        pairs.append(("filler", f"e{j}"))
        hours.append(1.0)
    return dataset_from_pairs(pairs, hours)


class TestSplit:
    def test_one_triplet_per_source(self):
        ds = _last_day_dataset()
        sp = split_leave_one_out(ds, seed=3)
        # every s* source has exactly one last-day event; filler has none
        assert len(sp.eval_set) == ds.n_sources - 1
        assert sp.train.n_interactions == ds.n_interactions - len(sp.eval_set)

    def test_disjoint_and_negatives_unobserved(self, planted):
        ds, sp = planted
        ev = sp.eval_set
        assert not sp.train.contains(ev.sources, ev.positives).any()
        assert ds.contains(ev.sources, ev.positives).all()
        assert not ds.contains(ev.sources, ev.negatives).any()
        assert (sp.train.source_degrees()[ev.sources] >= 1).all()
        lo = int(last_day(ds.window)[0].timestamp())
        times = {(s, e): t for s, e, t in zip(ds.source_idx, ds.event_idx, ds.times)}
        assert all(times[(s, p)] >= lo for s, p, _ in ev.triplets())

    def test_deterministic(self, planted):
        ds, sp = planted
        again = split_leave_one_out(ds, seed=0)
        np.testing.assert_array_equal(again.eval_set.negatives, sp.eval_set.negatives)
        np.testing.assert_array_equal(again.eval_set.positives, sp.eval_set.positives)
        other = split_leave_one_out(ds, seed=1)
        assert not np.array_equal(other.eval_set.negatives, sp.eval_set.negatives)

    def test_empty_holdout_warns(self):
        ds = dataset_from_pairs([("a", "x"), ("a", "y"), ("b", "x")], hours=[1, 2, 3])
        with pytest.warns(UserWarning, match="empty"):
            sp = split_leave_one_out(ds, seed=0)
        assert len(sp.eval_set) == 0

    def test_trainless_source_skipped(self):
        ds = dataset_from_pairs([("a", "x"), ("a", "y"), ("b", "z")], hours=[1, 6.5 * 24, 6.5 * 24])
        sp = split_leave_one_out(ds, seed=0)
        assert sp.eval_set.sources.tolist() == [0]
        assert sp.skipped_sources == 1

    def test_holdout_outside_window(self):
        ds = _last_day_dataset()
        with pytest.raises(ValueError):
            split_leave_one_out(ds, (T0 - timedelta(days=1), T0), seed=0)


def test_dataset_roundtrip(tmp_path, planted):
    ds, sp = planted
    save_dataset(ds, tmp_path / "d")
    back = load_dataset(tmp_path / "d")
    assert back.sources == ds.sources and back.window == ds.window
    np.testing.assert_array_equal(back.times, ds.times)
    save_split(sp, tmp_path / "s")
    sp2 = load_split(tmp_path / "s")
    assert sp2.eval_set.triplets() == sp.eval_set.triplets()
    save_dataset(back, tmp_path / "d2")
    for name in ("sources.tsv", "events.tsv", "interactions.tsv", "meta.json"):
        assert (tmp_path / "d" / name).read_bytes() == (tmp_path / "d2" / name).read_bytes()


def test_interactions_tsv_layout(tmp_path):
    ds = dataset_from_pairs([("a", "x")], hours=[12])
    save_dataset(ds, tmp_path)
    assert (tmp_path / "interactions.tsv").read_text() == "0\t0\t2016-10-01T12:00:00Z\n"
    assert (tmp_path / "sources.tsv").read_text() == "0\ta\n"
