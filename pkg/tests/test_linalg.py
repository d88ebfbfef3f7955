from fractions import Fraction

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from crnkit import linalg


def test_rank_and_nullspace_small():
    a = np.array([[1, 2, 3], [2, 4, 6], [1, 0, 1]])
    assert linalg.rank(a) == 2
    (v,) = linalg.nullspace(a)
    assert linalg.matvec(a.tolist(), v) == [0, 0, 0]
    assert linalg.primitive(v) == [1, 1, -1]


def test_left_nullspace_gives_conservation():
    gamma = np.array([[-1, 1], [1, -1]])
    (w,) = linalg.left_nullspace(gamma)
    assert linalg.primitive(w) == [1, 1]


def test_independent_rows_are_pivot_rows():
    a = np.array([[1, 1], [2, 2], [0, 1]])
    assert linalg.independent_rows(a) == [0, 2]


def test_primitive_sign_and_scaling():
    assert linalg.primitive([Fraction(-1, 2), Fraction(1, 3)]) == [3, -2]
    assert linalg.primitive([0, Fraction(4), Fraction(6)]) == [0, 2, 3]


def test_fraction_input():
    a = [[Fraction(1, 2), Fraction(1, 3)]]
    (v,) = linalg.nullspace(a)
    assert a[0][0] * v[0] + a[0][1] * v[1] == 0


@settings(max_examples=150, deadline=None)
@given(arrays(np.int64, st.tuples(st.integers(1, 5), st.integers(1, 6)), elements=st.integers(-4, 4)))
def test_rank_nullity_against_numpy(a):
    basis = linalg.nullspace(a)
    r = linalg.rank(a)
    assert r == np.linalg.matrix_rank(a.astype(float))
    assert r + len(basis) == a.shape[1]
    for v in basis:
        assert all(x == 0 for x in linalg.matvec(a.tolist(), v))
    if basis:
        assert np.linalg.matrix_rank(np.array(basis, dtype=float)) == len(basis)
    rows = linalg.independent_rows(a)
    assert len(rows) == r and linalg.rank(a[rows]) == r
