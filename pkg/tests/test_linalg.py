from fractions import Fraction

import numpy as np
import sympy
from hypothesis import given, settings, strategies as st

from cocyclelab import linalg as la

small = st.integers(-3, 3).map(Fraction)


def exact_matrix(rows, cols):
    return st.lists(st.lists(small, min_size=cols, max_size=cols), min_size=rows, max_size=rows).map(
        lambda m: np.array(m, dtype=object).reshape(rows, cols))


shapes = st.tuples(st.integers(1, 5), st.integers(1, 5))


@settings(max_examples=150, deadline=None)
@given(shapes.flatmap(lambda s: exact_matrix(*s)))
def test_exact_rank_and_kernel_match_sympy(A):
    M = sympy.Matrix(A.tolist())
    assert la.rank(A) == M.rank()
    K = la.nullspace(A)
    assert K.shape[1] == A.shape[1] - M.rank()
    assert la.is_zero(A @ K)


@settings(max_examples=150, deadline=None)
@given(shapes.flatmap(lambda s: exact_matrix(*s)))
def test_float_path_agrees_with_exact(A):
    Af = la.as_float(A)
    assert la.rank(Af) == la.rank(A)
    K = la.nullspace(Af)
    assert np.allclose(Af @ K, 0, atol=1e-9)
    C = la.column_space(Af)
    assert np.allclose(C.T @ C, np.eye(C.shape[1]), atol=1e-9)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 4).flatmap(lambda n: exact_matrix(n, n)))
def test_inverse_and_solve(A):
    if la.rank(A) < A.shape[0]:
        return
    Ai = la.inverse(A)
    assert la.is_zero(A @ Ai - la.eye(A.shape[0], True))
    b = np.array([Fraction(i + 1) for i in range(A.shape[0])], dtype=object)
    x = la.solve(A, b)
    assert la.is_zero(A @ x - b)


def test_rank_ignores_rounding_noise():
    noise = np.array([[1e-17, -2e-16], [3e-17, 1e-16]])
    assert la.rank(noise) == 0
    assert la.nullspace(noise).shape[1] == 2


def test_spans():
    U = la.as_exact([[1, 0], [0, 1], [0, 0]])
    W = la.as_exact([[1, 1], [1, -1], [0, 0]])
    assert la.same_span(U, W)
    assert la.in_span(U, la.as_exact([3, 4, 0]))
    assert not la.in_span(U, la.as_exact([0, 0, 1]))
    X = la.intersect(U, la.as_exact([[0], [1], [1]]))
    assert X.shape[1] == 0


def test_parse_scalar():
    assert la.parse_scalar("3/4") == Fraction(3, 4)
    assert la.parse_scalar("3/4", exact=False) == 0.75
    assert la.parse_scalar(2.0) == 2
