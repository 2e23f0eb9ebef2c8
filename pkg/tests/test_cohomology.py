from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cocyclelab import linalg as la
from cocyclelab.cohomology import (InhomCocycle, averaging_primitive, b1_space, coboundary_membership,
                                   expand_word_cocycle, harmonic_decomposition, h1, hn, hom_table_to_inhom,
                                   inhom_to_hom, is_cocycle, z1_space)
from cocyclelab.corpus import FINITE_CATALOG, rep_finite
from cocyclelab.errors import NormPreconditionFailed
from cocyclelab.groups import (FiniteSupportMeasure, FreeAbelianGroup, FreeGroup, HeisenbergGroup, cyclic_group,
                               permutation_group)
from cocyclelab.reps import Representation
from cocyclelab.words import Word

Z = FreeGroup(1, ["a"])
F2 = FreeGroup(2, ["a", "b"])
Z2 = FreeAbelianGroup(2, ["a", "b"])
R3 = np.array([[-0.5, -np.sqrt(3) / 2], [np.sqrt(3) / 2, -0.5]])


def rotation_rep():
    return Representation(Z2, [R3, np.eye(2)], False)


def brute_force_z1_dim(rho) -> int:
    """Cocycles as functions on all of G solving beta(gh) = rho_g beta(h) + beta(g) for all pairs."""
    G = rho.group
    n, d = G.order, rho.dim
    rows = []
    for g in range(n):
        Mg = la.as_float(rho.of_element(g))
        for h in range(n):
            gh = int(G.table[g, h])
            block = np.zeros((d, n * d))
            block[:, gh * d : (gh + 1) * d] += np.eye(d)
            block[:, h * d : (h + 1) * d] -= Mg
            block[:, g * d : (g + 1) * d] -= np.eye(d)
            rows.append(block)
    return n * d - la.rank(np.vstack(rows))


def test_word_expansion():
    rho = Representation(Z, [[[2, 0], [0, 3]]], True)
    b = InhomCocycle(rho, [[1, 1]])
    assert la.is_zero(expand_word_cocycle(b, Word()))
    s2 = expand_word_cocycle(b, Z.parse("a^2"))
    assert la.is_zero(s2 - (b.values[0] + rho.images[0] @ b.values[0]))
    H = HeisenbergGroup()
    triv = Representation.trivial(H, 2)
    v = la.as_exact([3, -1])
    bz = InhomCocycle(triv, [triv.zeros(), triv.zeros(), v])
    for n in range(1, 6):
        assert la.is_zero(expand_word_cocycle(bz, H.parse(f"z^{n}")) - n * v)


def test_z1_dims():
    for d in (1, 2, 3):
        assert z1_space(Representation.trivial(F2, d)).shape[1] == 2 * d
    for n in (2, 3, 5):
        assert z1_space(Representation.trivial(cyclic_group(n))).shape[1] == 0
    assert z1_space(rotation_rep()).shape[1] == 2


def test_b1_dims():
    assert b1_space(Representation.trivial(F2, 2)).shape[1] == 0
    assert b1_space(Representation(cyclic_group(2), [[[-1]]], True)).shape[1] == 1
    assert b1_space(rotation_rep()).shape[1] == 2


def test_h1_dims():
    s = h1(Representation.trivial(Z))
    assert (s.dim_Z, s.dim_B, s.dim_H) == (1, 0, 1)
    for k in (1, 2, 3):
        s = h1(Representation.trivial(F2, k))
        assert (s.dim_Z, s.dim_B, s.dim_H) == (2 * k, 0, 2 * k)


def test_membership_examples():
    sign = Representation(cyclic_group(2), [[[-1]]], True)
    m = coboundary_membership(InhomCocycle(sign, [[2]]))
    assert m.is_coboundary and m.primitive[0] == 1
    assert coboundary_membership(InhomCocycle.zero(sign)).primitive[0] == 0
    m = coboundary_membership(InhomCocycle(Representation.trivial(Z), [[1]]))
    assert m.status == "not-coboundary" and m.primitive is None


finite_names = st.sampled_from(sorted(FINITE_CATALOG))


@settings(max_examples=40, deadline=None)
@given(finite_names, st.integers(0, 2**32 - 1), st.booleans())
def test_finite_groups_have_vanishing_h1(name, seed, exact):
    rng = np.random.default_rng(seed)
    perms, names = FINITE_CATALOG[name]
    G = permutation_group(perms, names)
    rho = Representation(G, rep_finite(rng, perms, exact), exact)
    s = h1(rho)
    assert s.dim_H == 0
    assert s.dim_Z == brute_force_z1_dim(rho)
    # every cocycle has the averaging primitive
    for j in range(s.Z.shape[1]):
        b = InhomCocycle.from_vector(rho, s.Z[:, j])
        v = averaging_primitive(b)
        diff = InhomCocycle.coboundary(rho, v).vector() - b.vector()
        assert la.max_abs(diff) <= (0 if exact else 1e-8)
        assert coboundary_membership(b).is_coboundary


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_cocycle_law_on_random_words(seed):
    rng = np.random.default_rng(seed)
    rho = rotation_rep()
    Zb = z1_space(rho)
    b = InhomCocycle.from_vector(rho, Zb @ rng.standard_normal(Zb.shape[1]))
    assert is_cocycle(b)[0]
    for _ in range(5):
        g = Word(tuple((int(rng.integers(2)), int(rng.choice([-1, 1]))) for _ in range(rng.integers(0, 6))))
        h = Word(tuple((int(rng.integers(2)), int(rng.choice([-1, 1]))) for _ in range(rng.integers(0, 6))))
        lhs = b(g * h)
        rhs = rho.of(g) @ b(h) + b(g)
        assert np.allclose(lhs, rhs, atol=1e-9)


def test_bar_complex_vanishing():
    sign = Representation(cyclic_group(2), [[[-1]]], True)
    assert hn(sign, 1).dim_H == 0
    C2xC2 = permutation_group([[1, 0, 2, 3], [0, 1, 3, 2]])
    for n in (1, 2):
        assert hn(Representation.trivial(C2xC2, 1), n).dim_H == 0
    C4 = cyclic_group(4)
    s = hn(Representation(C4, [[[-1]]], True), 2)
    assert s.dim_H == 0 and s.dim_Z == s.dim_B


def test_bar_degree_one_matches_relators():
    S3 = permutation_group([[1, 0, 2], [1, 2, 0]])
    rho = Representation(S3, [[[0, 1, 0], [1, 0, 0], [0, 0, 1]], [[0, 0, 1], [1, 0, 0], [0, 1, 0]]], True)
    a, b = hn(rho, 1), h1(rho)
    assert (a.dim_Z, a.dim_B, a.dim_H) == (b.dim_Z, b.dim_B, b.dim_H)


def test_homogeneous_round_trip_on_z3():
    C3 = cyclic_group(3)
    rho = Representation(C3, [[[0, -1], [1, -1]]], True)
    Zb = z1_space(rho)
    b = InhomCocycle.from_vector(rho, Zb @ la.as_exact([2, -1][: Zb.shape[1]]))
    table = inhom_to_hom(b)
    assert table.shape == (3, 3, 2)
    back = hom_table_to_inhom(rho, table)
    assert la.is_zero(back.vector() - b.vector())
    # homogeneous equivariance f(gx, gy) = rho_g f(x, y) on all 9 pairs
    for g in range(3):
        M = rho.of_element(g)
        for x in range(3):
            for y in range(3):
                gx, gy = int(C3.table[g, x]), int(C3.table[g, y])
                assert la.is_zero(table[gx, gy] - M @ table[x, y])


def test_harmonic_f2_sign_example():
    rho = Representation(F2, [[[-1]], [[1]]], True)
    mu = FiniteSupportMeasure.uniform(F2, ["a", "b"])
    hd = harmonic_decomposition(rho, mu)
    assert hd.dims == (2, 1, 1)
    assert hd.markov_norm == pytest.approx(0)
    # P fixes coboundaries exactly
    assert la.is_zero(hd.P @ hd.B - hd.B)


def test_harmonic_needs_norm_below_one():
    with pytest.raises(NormPreconditionFailed):
        harmonic_decomposition(Representation.trivial(F2), FiniteSupportMeasure.uniform(F2, ["a", "b"]))


def test_harmonic_projection_fixes_coboundaries_when_markov_zero():
    sign = Representation(cyclic_group(2), [[[-1]]], True)
    mu = FiniteSupportMeasure.uniform(cyclic_group(2), ["e", "a"])
    hd = harmonic_decomposition(sign, mu)
    b = InhomCocycle.coboundary(sign, [Fraction(5)])
    assert la.is_zero(hd.P @ b.vector() - b.vector())
