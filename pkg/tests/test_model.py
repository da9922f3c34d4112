import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import expit
from scipy.stats import ortho_group

from sourcebias.model import FactorModel, init_model, load_model, save_model, score, score_triplet


def test_init_reproducible():
    a = init_model(3, 4, 2, seed=7)
    b = init_model(3, 4, 2, seed=7)
    np.testing.assert_array_equal(a.P, b.P)
    np.testing.assert_array_equal(a.Q, b.Q)
    assert a.P.shape == (2, 3) and a.Q.shape == (2, 4)


@pytest.mark.parametrize("kwargs", [dict(scale=0), dict(scale=-1), dict(K=0), dict(num_sources=0)])
def test_init_rejects(kwargs):
    args = dict(num_sources=3, num_events=4, K=2, seed=0)
    args.update(kwargs)
    with pytest.raises(ValueError):
        init_model(**args)


def test_init_gaussian_mean():
    m = init_model(1, 1000, 1000, seed=1, scale=0.1)
    entries = m.Q.ravel()
    assert entries.size == 10**6
    assert abs(entries.mean()) < 3 * 0.1 / np.sqrt(entries.size)
    assert entries.std() == pytest.approx(0.1, rel=0.01)


def test_score_arithmetic():
    m = FactorModel(np.array([[1.0, 0.0], [2.0, 0.0]]), np.array([[3.0, 1.0], [4.0, -1.0]]))
    assert score(m, 0, 0) == 11.0
    assert score(m, 1, 0) == 0.0 and score(m, 1, 1) == 0.0
    np.testing.assert_array_equal(m.score(np.array([0, 0]), np.array([0, 1])), [11.0, -1.0])


def test_score_not_clamped():
    m = FactorModel(np.full((1, 1), 10.0), np.full((1, 1), 10.0))
    assert m.score(0, 0) == 100.0


def test_index_errors():
    m = init_model(2, 2, 2, seed=0)
    with pytest.raises(IndexError):
        m.score(2, 0)
    with pytest.raises(IndexError):
        m.score_triplet(0, 0, -1)


def test_nonfinite_rejected():
    with pytest.raises(ValueError):
        FactorModel(np.array([[np.nan]]), np.zeros((1, 1)))


def test_rotation_invariance():
    m = init_model(5, 7, 4, seed=2)
    Rot = ortho_group.rvs(4, random_state=3)
    r = FactorModel(Rot @ m.P, Rot @ m.Q)
    s, e = np.meshgrid(np.arange(5), np.arange(7), indexing="ij")
    np.testing.assert_allclose(r.score(s, e), m.score(s, e), atol=1e-13)


def test_triplet_identities():
    m = init_model(4, 6, 3, seed=5)
    for s in range(4):
        assert score_triplet(m, s, 2, 2) == 0.0
        for i in range(6):
            for j in range(6):
                d = score_triplet(m, s, i, j)
                assert d == -score_triplet(m, s, j, i)
                assert d == pytest.approx(m.score(s, i) - m.score(s, j), abs=1e-15)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.01, 2.0))
def test_sigmoid_of_triplet_in_open_interval(seed, scale):
    # bounded scale keeps |x| well below where float64 expit rounds to 0 or 1
    m = init_model(3, 5, 4, seed=seed, scale=scale)
    x = m.score_triplet(np.array([0, 1, 2]), np.array([0, 1, 2]), np.array([3, 4, 0]))
    p = expit(x)
    assert np.all((p > 0) & (p < 1))


def test_save_load_roundtrip(tmp_path):
    m = init_model(3, 5, 2, seed=0)
    m.source_names = ("a", "b", "c")
    m.event_ids = tuple("vwxyz")
    m.meta = {"seed": 0}
    save_model(m, tmp_path)
    back = load_model(tmp_path)
    np.testing.assert_array_equal(back.P, m.P)
    np.testing.assert_array_equal(back.Q, m.Q)
    assert back.source_names == m.source_names and back.meta == {"seed": 0}
    raw = np.frombuffer((tmp_path / "P.bin").read_bytes(), dtype="<f8")
    # column-major: first K values are source 0's embedding
    np.testing.assert_array_equal(raw[:2], m.P[:, 0])
