import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sourcebias.baselines import jaccard_distance, knn_scorer, popularity_scorer

from conftest import dataset_from_pairs

COVERAGE = {
    "a": {"e1", "e2", "e3"},
    "b": {"e1", "e2", "e4"},
    "c": {"e3", "e5"},
    "d": {"e1", "e2", "e3", "e4", "e5"},
}


@pytest.fixture
def four_sources():
    return dataset_from_pairs([(s, e) for s, evs in sorted(COVERAGE.items()) for e in sorted(evs)])


def test_popularity_counts(four_sources):
    ds = four_sources
    pop = popularity_scorer(ds)
    R = ds.to_dense()
    column_sums = [sum(int(R[s, e]) for s in range(ds.n_sources)) for e in range(ds.n_events)]
    for s in range(ds.n_sources):
        np.testing.assert_array_equal(pop(np.full(ds.n_events, s), np.arange(ds.n_events)), column_sums)
    assert np.argsort(-pop(0, np.arange(ds.n_events)), kind="stable").tolist() == \
        np.argsort(-np.array(column_sums), kind="stable").tolist()


def test_popularity_seven():
    ds = dataset_from_pairs([(f"s{i}", "hot") for i in range(7)] + [("s0", "cold")])
    pop = popularity_scorer(ds)
    hot = ds.events.index("hot")
    assert {pop(s, hot) for s in range(7)} == {7.0}


def test_jaccard_boundaries():
    assert jaccard_distance({1, 2}, {1, 2}) == 0.0
    assert jaccard_distance({1}, {2}) == 1.0


@given(st.sets(st.integers(0, 20), min_size=1), st.sets(st.integers(0, 20), min_size=1))
def test_jaccard_symmetric_bounded(a, b):
    d = jaccard_distance(a, b)
    assert d == jaccard_distance(b, a)
    assert 0.0 <= d <= 1.0
    assert jaccard_distance(a, a) == 0.0


def test_knn_matches_enumeration(four_sources):
    ds = four_sources
    sets = {ds.sources.index(s): {ds.events.index(e) for e in evs} for s, evs in COVERAGE.items()}
    k = 2
    knn = knn_scorer(ds, k)
    for s in range(ds.n_sources):
        others = [(jaccard_distance(sets[s], sets[n]), n) for n in range(ds.n_sources) if n != s]
        nbrs = [n for _, n in sorted(others)[:k]]
        assert knn.neighbors[s].tolist() == nbrs
        for e in range(ds.n_events):
            expected = sum(1 - jaccard_distance(sets[s], sets[n]) for n in nbrs if e in sets[n])
            assert knn(s, e) == pytest.approx(expected, abs=1e-12)


def test_knn_identical_and_disjoint():
    ds = dataset_from_pairs([("a", "x"), ("a", "y"), ("b", "x"), ("b", "y"), ("c", "z")])
    knn = knn_scorer(ds, 1)
    assert knn.neighbors[0].tolist() == [1]
    assert knn.weights[0, 0] == 1.0
    # c's only candidates are disjoint: weight 0, contributes nothing
    assert knn.weights[2, 0] == 0.0
    assert knn(2, 0) == 0.0


def test_knn_few_sources_warns(four_sources):
    with pytest.warns(UserWarning, match="other sources"):
        knn = knn_scorer(four_sources, 10)
    assert knn.neighbors.shape == (4, 3)


def test_knn_rejects_k0(four_sources):
    with pytest.raises(ValueError):
        knn_scorer(four_sources, 0)


def test_knn_blockwise_matches_single_block(planted):
    _, sp = planted
    from sourcebias.baselines import KNNScorer

    a = KNNScorer(sp.train, 10, block=37)
    b = KNNScorer(sp.train, 10, block=10_000)
    np.testing.assert_array_equal(a.neighbors, b.neighbors)
