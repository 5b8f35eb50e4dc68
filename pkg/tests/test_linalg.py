from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from crnkit import linalg

small_q = st.fractions(min_value=-4, max_value=4, max_denominator=4)


@st.composite
def matrices(draw, max_rows=8, max_cols=8):
    m = draw(st.integers(1, max_rows))
    n = draw(st.integers(1, max_cols))
    return [[draw(small_q) for _ in range(n)] for _ in range(m)]


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_rank_matches_sympy(M):
    assert linalg.rank(M) == sympy.Matrix(M).rank()


@settings(max_examples=100, deadline=None)
@given(matrices())
def test_null_space_is_orthogonal_and_complete(M):
    n = len(M[0])
    basis = linalg.null_space_basis(M, n)
    assert len(basis) == n - linalg.rank(M)
    for w in basis:
        assert all(sum(a * b for a, b in zip(row, w)) == 0 for row in M)
        assert all(c.denominator == 1 for c in w)
    if basis:
        assert linalg.rank(basis, n) == len(basis)


@settings(max_examples=100, deadline=None)
@given(matrices(max_rows=5, max_cols=5))
def test_determinant_matches_sympy(M):
    k = min(len(M), len(M[0]))
    sq = [row[:k] for row in M[:k]]
    assert linalg.determinant(sq) == sympy.Matrix(sq).det()


def test_solve_left():
    x = linalg.solve_left([[5, -2], [-2, 1]], [5, 4])
    assert x == [13, 30]
    with pytest.raises(ZeroDivisionError):
        linalg.solve_left([[1, 1], [1, 1]], [1, 1])


def test_primitive_scaling():
    assert linalg.primitive([Fraction(-1, 2), Fraction(1, 3)]) == [3, -2]


def test_fm_simple_cases():
    assert linalg.fm_solve([([1], 1), ([-1], -3)], 1) is not None
    assert linalg.fm_solve([([1], 2), ([-1], -1)], 1) is None
    x = linalg.fm_solve([([1, 1], 1), ([1, -1], 0), ([0, -1], -5)], 2)
    assert x[0] + x[1] >= 1 and x[0] >= x[1] and x[1] <= 5


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 3), st.lists(st.tuples(st.lists(st.integers(-3, 3), min_size=3, max_size=3),
                                             st.integers(-3, 3)), min_size=1, max_size=6))
def test_fm_feasibility_agrees_with_linprog(n, rows):
    cons = [(a[:n], c) for a, c in rows]
    x = linalg.fm_solve(cons, n)
    # oracle: min 0 s.t. -a.x <= -c, free variables
    res = linprog(np.zeros(n), A_ub=-np.array([a for a, _ in cons], float),
                  b_ub=-np.array([c for _, c in cons], float), bounds=[(None, None)] * n, method="highs")
    assert (x is not None) == (res.status == 0)
    if x is not None:
        for a, c in cons:
            assert sum(Fraction(ai) * xi for ai, xi in zip(a, x)) >= c
