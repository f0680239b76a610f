from fractions import Fraction

import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from symsector import linalg as la

small = st.lists(st.lists(st.integers(-3, 3), min_size=3, max_size=3), min_size=1, max_size=4)


def test_rank_and_kernel():
    m = la.mat([[1, 2, 3], [2, 4, 6]])
    assert la.rank(m) == 1
    K = la.kernel(m)
    assert K.shape == (3, 2) and la.is_zero(la.matmul(m, K))
    L = la.left_kernel(m)
    assert L.shape == (1, 2) and la.is_zero(la.matmul(L, m))


def test_exact_rationals():
    m = la.mat([[Fraction(1, 3), 1], [1, 3]])
    assert la.rank(m) == 1
    assert la.to_fractions(la.scale(la.eye(2), Fraction(1, 2))) == [[Fraction(1, 2), 0], [0, Fraction(1, 2)]]


def test_stacking_and_kron():
    a, b = la.eye(2), la.mat([[1, 2]])
    assert la.hstack(a, la.zeros(2, 1)).shape == (2, 3)
    assert la.vstack(a, b).shape == (3, 2)
    assert la.block_diag(a, b).shape == (3, 4)
    assert la.to_fractions(la.kron(b, b)) == [[1, 2, 2, 4]]


def test_solve_columns():
    a = la.mat([[1, 1], [0, 1]])
    x = la.solve_columns(a, la.mat([[3], [1]]))
    assert la.to_fractions(x) == [[2], [1]]
    assert la.solve_columns(la.mat([[1], [1]]), la.mat([[1], [0]])) is None


@given(small)
def test_rank_matches_numpy(rows):
    got = la.rank(la.mat(rows))
    assert got == np.linalg.matrix_rank(np.array(rows, dtype=float))
    entries = [(i, j, v) for i, r in enumerate(rows) for j, v in enumerate(r) if v]
    assert la.sparse_rank((len(rows), 3), entries) == got


@given(small)
def test_rank_nullity(rows):
    m = la.mat(rows)
    assert la.rank(m) + la.kernel(m).shape[1] == 3


def test_homology_dim():
    d = la.mat([[1], [1]])
    assert la.homology_dim(la.zeros(1, 0), d, 1) == 0
    assert la.homology_dim(d, la.mat([[1, -1]]), 2) == 0
    assert la.is_invertible(la.eye(3)) and not la.is_invertible(la.zeros(2, 2))
