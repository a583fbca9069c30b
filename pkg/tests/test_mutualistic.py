import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from ecotrade.errors import EcotradeError, NothingToAnalyzeError
from ecotrade.mutualistic import BinaryMatrix, fill_fraction, threshold, trim_empty


def test_threshold_far_above():
    q = threshold(np.array([[0.5]]), 1e-3)
    assert q.cells[0, 0]


def test_threshold_zero_element():
    for mu in (1e-9, 1e-3, 0.5):
        assert not threshold(np.array([[0.0]]), mu).cells[0, 0]


def test_threshold_tie_maps_to_one():
    assert threshold(np.array([[1e-3]]), 1e-3).cells[0, 0]


def test_threshold_transposes_and_keeps_labels():
    m = np.array([[1.0, 0.0, 0.2], [0.0, 0.0, 0.5]])  # 2 products x 3 countries
    q = threshold(m, 0.1, "export", products=["331", "541"], countries=["A", "B", "C"])
    assert q.shape == (3, 2)
    assert q.row_labels == ("A", "B", "C")
    assert q.col_labels == ("331", "541")
    np.testing.assert_array_equal(q.cells, (m >= 0.1).T)
    assert q.flow == "export" and q.mu == 0.1


@pytest.mark.parametrize("mu", [0.0, 1.0, -1e-3, 2.0])
def test_threshold_rejects_mu(mu):
    with pytest.raises(EcotradeError):
        threshold(np.ones((2, 2)) * 0.5, mu)


def test_fill_fraction_examples():
    assert fill_fraction(BinaryMatrix.from_array([[1, 0], [0, 0]])) == 0.25
    assert fill_fraction(BinaryMatrix.from_array(np.ones((3, 4)))) == 1.0
    assert fill_fraction(BinaryMatrix.from_array(np.zeros((3, 4)))) == 0.0


def test_fill_fraction_empty_matrix():
    with pytest.raises(EcotradeError):
        fill_fraction(BinaryMatrix((), (), np.zeros((0, 0))))


def test_trim_example():
    q = BinaryMatrix(("a", "b"), ("x", "y"), np.array([[1, 0], [0, 0]]))
    t, dr, dc = trim_empty(q)
    np.testing.assert_array_equal(t.cells, [[True]])
    assert t.row_labels == ("a",) and t.col_labels == ("x",)
    assert dr == ("b",) and dc == ("y",)


def test_trim_identity():
    q = BinaryMatrix.from_array([[1, 0], [0, 1]])
    t, dr, dc = trim_empty(q)
    np.testing.assert_array_equal(t.cells, q.cells)
    assert t.row_labels == q.row_labels and dr == () and dc == ()


def test_trim_all_zero():
    with pytest.raises(NothingToAnalyzeError, match="nothing to analyze"):
        trim_empty(BinaryMatrix.from_array(np.zeros((2, 2))))


def test_shape_label_mismatch():
    with pytest.raises(EcotradeError):
        BinaryMatrix(("a",), ("x", "y"), np.ones((2, 2)))


unit = arrays(np.float64, st.tuples(st.integers(1, 6), st.integers(1, 6)),
              elements=st.floats(0, 1, allow_nan=False))


@settings(max_examples=100, deadline=None)
@given(unit, st.floats(1e-6, 0.99), st.floats(1e-6, 0.99))
def test_threshold_monotone(m, mu1, mu2):
    lo, hi = sorted((mu1, mu2))
    q_lo, q_hi = threshold(m, lo), threshold(m, hi)
    assert not np.any(q_hi.cells & ~q_lo.cells)
    assert fill_fraction(q_hi) <= fill_fraction(q_lo)


@settings(max_examples=100, deadline=None)
@given(arrays(np.bool_, st.tuples(st.integers(1, 6), st.integers(1, 6))))
def test_trim_idempotent(cells):
    if not cells.any():
        return
    once, _, _ = trim_empty(BinaryMatrix.from_array(cells))
    twice, dr, dc = trim_empty(once)
    np.testing.assert_array_equal(once.cells, twice.cells)
    assert dr == () and dc == ()


@settings(max_examples=100, deadline=None)
@given(unit, st.floats(1e-6, 0.99), st.randoms(use_true_random=False))
def test_threshold_commutes_with_permutation(m, mu, rnd):
    rp = list(range(m.shape[0]))
    cp = list(range(m.shape[1]))
    rnd.shuffle(rp)
    rnd.shuffle(cp)
    a = threshold(m[np.ix_(rp, cp)], mu).cells
    b = threshold(m, mu).cells[np.ix_(cp, rp)]
    np.testing.assert_array_equal(a, b)
