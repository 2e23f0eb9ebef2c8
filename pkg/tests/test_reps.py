from fractions import Fraction

import numpy as np
import pytest

from cocyclelab import linalg as la
from cocyclelab.errors import NoCertificate, RelatorViolation
from cocyclelab.groups import FiniteSupportMeasure, FreeAbelianGroup, FreeGroup, Subgroup, cyclic_group, permutation_group
from cocyclelab.reps import (Representation, almost_invariant_margin, certify_isometric, dual_representation,
                             fixed_space, laplacian, markov_operator, mu_fixed_space, operator_norm,
                             validate_representation)

Z = FreeGroup(1, ["a"])
C2 = cyclic_group(2)


def rot(t):
    return np.array([[np.cos(t), -np.sin(t)], [np.sin(t), np.cos(t)]])


def sign_rep():
    return Representation(C2, [[[-1]]], True)


def test_validate_examples():
    assert validate_representation(sign_rep())["valid"]
    with pytest.raises(RelatorViolation):
        validate_representation(Representation(C2, [[[2]]], True))
    A = FreeAbelianGroup(2, ["a", "b"])
    with pytest.raises(RelatorViolation):
        validate_representation(Representation(A, [[[1, 1], [0, 1]], [[1, 0], [1, 1]]], True))


def test_certificates():
    R = Representation(Z, [rot(1.0)], False)
    assert np.allclose(certify_isometric(R).P, np.eye(2))
    with pytest.raises(NoCertificate):
        certify_isometric(Representation(Z, [[[2, 0], [0, Fraction(1, 2)]]], True))
    S3 = permutation_group([[1, 0, 2], [1, 2, 0]])
    M = np.array([[2, 1, 0], [0, 1, 0], [0, 0, 1]], dtype=object)
    Mi = la.inverse(la.as_exact(M))
    perm = [np.array([[0, 1, 0], [1, 0, 0], [0, 0, 1]], dtype=object), np.array([[0, 0, 1], [1, 0, 0], [0, 1, 0]],
                                                                               dtype=object)]
    rho = Representation(S3, [la.as_exact(M) @ la.as_exact(p) @ Mi for p in perm], True)
    validate_representation(rho)
    P = certify_isometric(rho).P
    for m in rho.images:
        assert la.is_zero(m.T @ P @ m - P)


def test_dual():
    rho = Representation(Z, [[[1, 1], [0, 1]]], True)
    assert la.is_zero(dual_representation(rho).images[0] - la.as_exact([[1, 0], [-1, 1]]))


def test_markov_and_laplacian():
    mu = FiniteSupportMeasure.uniform(C2, ["e", "a"])
    assert la.is_zero(markov_operator(sign_rep(), mu))
    assert la.is_zero(laplacian(sign_rep(), mu) - la.eye(1, True))
    R = Representation(Z, [rot(2 * np.pi / 3)], False)
    muz = FiniteSupportMeasure.uniform(Z, ["a", "a^-1"])
    # oracle: (R + R^T) / 2
    Rm = rot(2 * np.pi / 3)
    assert np.allclose(markov_operator(R, muz), (Rm + Rm.T) / 2)
    assert np.allclose(markov_operator(R, muz), -0.5 * np.eye(2))
    assert np.allclose(laplacian(R, muz), 1.5 * np.eye(2))
    delta = FiniteSupportMeasure.delta(Z)
    assert np.allclose(markov_operator(R, delta), np.eye(2))


def test_fixed_spaces():
    S3 = permutation_group([[1, 0, 2], [1, 2, 0]])
    perm = Representation(S3, [[[0, 1, 0], [1, 0, 0], [0, 0, 1]], [[0, 0, 1], [1, 0, 0], [0, 1, 0]]], True)
    F = fixed_space(perm)
    assert F.shape[1] == 1 and la.same_span(F, la.as_exact([[1], [1], [1]]))
    assert fixed_space(sign_rep()).shape[1] == 0
    assert fixed_space(Representation.trivial(S3, 2)).shape[1] == 2
    d = Representation(Z, [[[1, 0], [0, -1]]], True)
    V = mu_fixed_space(d, FiniteSupportMeasure.delta(Z, Z.parse("a")))
    assert la.same_span(V, la.as_exact([[1], [0]]))
    assert fixed_space(sign_rep(), Subgroup(C2, [])).shape[1] == 1


def test_operator_norms():
    assert operator_norm(np.eye(3), "1") == operator_norm(np.eye(3), "inf") == operator_norm(np.eye(3)) == 1
    assert operator_norm(-0.5 * np.eye(2)) == pytest.approx(0.5)
    assert operator_norm(np.array([[1, 1], [0, 1]]), "1") == 2


def test_margin():
    assert almost_invariant_margin(Representation.trivial(Z, 2)) == 0
    assert almost_invariant_margin(sign_rep()) == pytest.approx(2)
    R = Representation(Z, [rot(2 * np.pi / 3)], False)
    assert almost_invariant_margin(R) == pytest.approx(np.sqrt(3))
