from fractions import Fraction

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings, strategies as st

from cocyclelab import linalg as la
from cocyclelab.corpus import _conjugate, random_measure, rep_free
from cocyclelab.errors import NotDirect
from cocyclelab.groups import FiniteSupportMeasure, FreeAbelianGroup, FreeGroup, Subgroup, cyclic_group, permutation_group
from cocyclelab.reps import Representation, markov_operator
from cocyclelab.stationarity import (MatrixAlgebraAction, cesaro_projection, check_projection, convex_approximation,
                                     coset_count, gmu_invariance_check, harmonic_function_space, liouville_check,
                                     stationary_decomposition, stationary_states, unique_stationarity_equivalence,
                                     weak_unique_stationarity_check)

Z = FreeGroup(1, ["a"])
C2 = cyclic_group(2)
R3 = np.array([[-0.5, -np.sqrt(3) / 2], [np.sqrt(3) / 2, -0.5]])


def eigen_projection(T: np.ndarray) -> np.ndarray:
    """Oracle: spectral projection onto the generalized eigenvalue-1 space, via ordered Schur + Sylvester.

    With T = Q [[T11, T12], [0, T22]] Q* and spec(T11) = {1}, the projection is
    Q [[I, -X], [0, 0]] Q* where T11 X - X T22 = -T12.  Stable for non-normal T.
    """
    S, Q, k = scipy.linalg.schur(T.astype(complex), output="complex", sort=lambda z: abs(z - 1) < 1e-8)
    n = T.shape[0]
    if k == 0:
        return np.zeros((n, n))
    X = scipy.linalg.solve_sylvester(S[:k, :k], -S[k:, k:], -S[:k, k:])
    P = np.zeros((n, n), complex)
    P[:k, :k] = np.eye(k)
    P[:k, k:] = -X
    return np.real(Q @ P @ Q.conj().T)


def test_cesaro_examples():
    I = Representation.trivial(Z, 2)
    P = cesaro_projection(I, FiniteSupportMeasure.delta(Z, Z.parse("a")))
    assert la.is_zero(P.E - la.eye(2, True)) and P.iterations == 1
    R = Representation(Z, [R3], False)
    P = cesaro_projection(R, FiniteSupportMeasure.uniform(Z, ["a", "a^-1"]))
    assert np.allclose(P.E, 0, atol=1e-12)
    D = Representation(Z, [[[1, 0], [0, -1]]], True)
    P = cesaro_projection(D, FiniteSupportMeasure.delta(Z, Z.parse("a")))
    assert la.is_zero(P.E - la.as_exact([[1, 0], [0, 0]]))
    assert all(v for k, v in check_projection(P, D, FiniteSupportMeasure.delta(Z, Z.parse("a"))).items()
               if k != "residual")


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 5), st.booleans())
def test_cesaro_matches_spectral_oracle(seed, d, exact):
    rng = np.random.default_rng(seed)
    F2 = FreeGroup(2, ["a", "b"])
    rho = Representation(F2, _conjugate(rep_free(rng, 2, d, exact), rng, exact), exact)
    mu = FiniteSupportMeasure(F2, random_measure(rng, F2.names))
    P = cesaro_projection(rho, mu)
    T = la.as_float(markov_operator(rho, mu))
    assert np.allclose(la.as_float(P.E), eigen_projection(T), atol=1e-7)
    checks = check_projection(P, rho, mu)
    assert all(v for k, v in checks.items() if k != "residual")
    if exact and mu.exact:
        assert checks["residual"] == 0


def test_stationary_decomposition_examples():
    D = Representation(Z, [[[1, 0], [0, -1]]], True)
    sd = stationary_decomposition(D, FiniteSupportMeasure.delta(Z, Z.parse("a")))
    assert la.same_span(sd.V0, la.as_exact([[0], [1]])) and la.same_span(sd.Vmu, la.as_exact([[1], [0]]))
    sd = stationary_decomposition(D, FiniteSupportMeasure.delta(Z))
    assert sd.V0.shape[1] == 0 and sd.Vmu.shape[1] == 2
    sign = Representation(C2, [[[-1]]], True)
    sd = stationary_decomposition(sign, FiniteSupportMeasure.uniform(C2, ["e", "a"]))
    assert sd.V0.shape[1] == 1 and sd.Vmu.shape[1] == 0
    w = weak_unique_stationarity_check(sign, FiniteSupportMeasure.uniform(C2, ["e", "a"]))
    assert w["weakly_uniquely_stationary"] and w["dim_dual_fixed"] == 0
    w = weak_unique_stationarity_check(D, FiniteSupportMeasure.delta(Z, Z.parse("a")))
    assert w["weakly_uniquely_stationary"] and w["pairing_rank"] == 1
    triv = Representation.trivial(Z, 3)
    assert weak_unique_stationarity_check(triv, FiniteSupportMeasure.delta(Z, Z.parse("a")))["pairing_rank"] == 3


def test_non_direct_when_not_power_bounded():
    J = Representation(Z, [[[1, 1], [0, 1]]], True)
    mu = FiniteSupportMeasure.delta(Z, Z.parse("a"))
    with pytest.raises(NotDirect):
        stationary_decomposition(J, mu)
    assert not weak_unique_stationarity_check(J, mu)["weakly_uniquely_stationary"]


def test_convex_approximation():
    R = Representation(Z, [R3], False)
    mu = FiniteSupportMeasure.uniform(Z, ["a", "a^-1"])
    out = convex_approximation(R, mu, [np.array([1.0, 0.0])], 0.01)
    assert out["residual"] < 0.01
    assert sum(out["weights"].values()) == pytest.approx(1)
    sign = Representation(C2, [[[-1]]], True)
    out = convex_approximation(sign, FiniteSupportMeasure.uniform(C2, ["e", "a"]), [la.as_exact([1])], 0.1)
    assert out["residual"] == 0 and out["N"] == 1
    assert {C2.fmt(w): p for w, p in out["weights"].items()} == {"e": Fraction(1, 2), "a": Fraction(1, 2)}
    triv = Representation.trivial(Z, 1)
    out = convex_approximation(triv, FiniteSupportMeasure.delta(Z, Z.parse("a")), [la.as_exact([1])], 0.1)
    assert out["N"] == 1


def test_harmonic_functions():
    C6 = cyclic_group(6)
    hs = harmonic_function_space(C6, FiniteSupportMeasure(C6, {"a^2": 1}))
    assert hs.dim == 2
    for j in range(2):
        f = hs.basis[:, j]
        assert f[0] == f[2] == f[4] and f[1] == f[3] == f[5]
    assert harmonic_function_space(C6, FiniteSupportMeasure.delta(C6)).dim == 6
    S3 = permutation_group([[1, 0, 2], [1, 2, 0]], ["s", "t"])
    all_words = [S3.word_of(g) for g in range(6)]
    assert harmonic_function_space(S3, FiniteSupportMeasure.uniform(S3, all_words)).dim == 1
    assert liouville_check(S3, FiniteSupportMeasure.uniform(S3, ["s", "t"]))
    assert liouville_check(C6, FiniteSupportMeasure.delta(C6))


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 12), st.integers(0, 2**32 - 1))
def test_coset_count_formula_on_cyclic_groups(n, seed):
    rng = np.random.default_rng(seed)
    G = cyclic_group(n)
    mu = FiniteSupportMeasure(G, random_measure(rng, G.names, 3))
    hs = harmonic_function_space(G, mu)
    assert hs.dim == coset_count(G, mu)
    assert liouville_check(G, mu)


def test_gmu_invariance():
    A = FreeAbelianGroup(2, ["a", "b"])
    rho = Representation(A, [R3, np.eye(2)], False)
    mu = FiniteSupportMeasure.uniform(A, ["b", "b^-1"])
    assert gmu_invariance_check(rho, mu, Subgroup(A, ["b"]))["pass"]
    C6 = cyclic_group(6)
    shift = np.roll(np.eye(6), 1, axis=0)
    reg = Representation(C6, [shift], True)
    assert gmu_invariance_check(reg, FiniteSupportMeasure(C6, {"a^2": 1}), Subgroup(C6, ["a^2"]))["pass"]


def flip_action(n=2):
    G = cyclic_group(n, "f")
    perm = [list(range(1, n)) + [0]]
    return G, MatrixAlgebraAction(G, [1] * n, perm, [[[[1]]] * n])


def test_stationary_states_flip():
    G, A = flip_action()
    mu = FiniteSupportMeasure.uniform(G, ["e", "f"])
    st_ = stationary_states(A, mu)
    assert st_["unique"]
    assert np.allclose(st_["point"], [0.5, 0.5], atol=1e-10)
    eq = unique_stationarity_equivalence(A, mu)
    assert eq["pass"] and eq["fixed_algebra_is_scalar"] and eq["clause"] == "equivalence"


def test_stationary_states_cyclic_three():
    G, A = flip_action(3)
    mu = FiniteSupportMeasure.uniform(G, ["e", "f", "f^2"])
    st_ = stationary_states(A, mu)
    assert st_["unique"] and np.allclose(st_["point"], [1 / 3] * 3, atol=1e-10)
    assert unique_stationarity_equivalence(A, mu)["pass"]


def test_stationary_states_swap_conjugation():
    G = cyclic_group(2, "f")
    A = MatrixAlgebraAction(G, [2], [[0]], [[[[0, 1], [1, 0]]]])
    st_ = stationary_states(A, FiniteSupportMeasure.uniform(G, ["e", "f"]))
    assert st_["affine_dim"] == 1 and not st_["unique"]


def test_trivial_action_all_states():
    G = cyclic_group(2, "f")
    A = MatrixAlgebraAction(G, [1, 1], [[0, 1]], [[[[1]], [[1]]]])
    mu = FiniteSupportMeasure.uniform(G, ["e", "f"])
    assert stationary_states(A, mu)["affine_dim"] == 1
    eq = unique_stationarity_equivalence(A, mu)
    assert eq["pass"] and not eq["uniquely_stationary"]
