import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cocyclelab import linalg as la
from cocyclelab.cohomology import InhomCocycle, h1
from cocyclelab.errors import NotFiniteIndex, UnsupportedFamily
from cocyclelab.groups import FreeAbelianGroup, FreeGroup, Subgroup, permutation_group
from cocyclelab.induction import (check_chi_defining, check_chi_law, chi_cocycle, coset_transversal,
                                  induce_cocycle, induce_representation, induction_h1_check, stages_equivalence)
from cocyclelab.reps import Representation
from cocyclelab.words import Word

Z = FreeAbelianGroup(1, ["a"])
F2 = FreeGroup(2, ["a", "b"])


def two_z():
    return coset_transversal(Z, Subgroup(Z, [Z.parse("a^2")]))


def f2_index_two():
    return coset_transversal(F2, Subgroup(F2, [F2.parse(w) for w in ("a^2", "b", "a b a^-1")]))


def random_word(rng, k, maxlen=6):
    return Word(tuple((int(rng.integers(k)), int(rng.choice([-1, 1]))) for _ in range(rng.integers(0, maxlen))))


def test_transversal_of_even_integers():
    D = two_z()
    assert D.index == 2
    assert [Z.fmt(r) for r in D.reps] == ["e", "a"]
    for n in range(-5, 6):
        x, gam = D.locate(Z.parse(f"a^{n}"))
        assert x == n % 2
        assert check_chi_defining(D, Z.parse(f"a^{n}"), 0)


def test_induced_sign_on_even_integers():
    D = two_z()
    base = Representation(D.sub_group, [[[-1]]], True)
    ind = induce_representation(base, D)
    A = ind.rep.images[0]
    # the generator swaps the two slots and picks up -1 once
    assert la.is_zero(A @ A + la.eye(2, True))
    assert sorted(abs(int(v)) for v in A.ravel()) == [0, 0, 1, 1]
    assert A[0, 0] == 0 and A[1, 1] == 0


def test_f2_index_two_transversal():
    D = f2_index_two()
    assert D.index == 2
    assert F2.fmt(D.reps[0]) == "e"
    # b fixes both cosets, a swaps them
    for x in range(2):
        _, y = chi_cocycle(D, F2.parse("b"), x)
        assert y == x
        _, y = chi_cocycle(D, F2.parse("a"), x)
        assert y == 1 - x
        assert check_chi_defining(D, F2.parse("a"), x)


def test_index_one_returns_base():
    D = coset_transversal(F2, Subgroup(F2, [F2.parse("a"), F2.parse("b")]))
    assert D.index == 1
    R = np.array([[0.0, -1.0], [1.0, 0.0]])
    base = Representation(D.sub_group, [R, -np.eye(2)], False)
    ind = induce_representation(base, D)
    assert np.allclose(ind.rep.images[0], R) and np.allclose(ind.rep.images[1], -np.eye(2))


def test_trivial_base_gives_coset_permutation():
    D = f2_index_two()
    ind = induce_representation(Representation.trivial(D.sub_group), D)
    for M in ind.rep.images:
        Mf = la.as_float(M)
        assert np.allclose(Mf.sum(axis=0), 1) and np.allclose(Mf.sum(axis=1), 1)
        assert set(np.unique(Mf)) <= {0.0, 1.0}
    assert la.is_zero(ind.rep.images[0] - la.as_exact([[0, 1], [1, 0]]))
    assert la.is_zero(ind.rep.images[1] - la.eye(2, True))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_chi_law_on_random_triples(seed):
    rng = np.random.default_rng(seed)
    D = f2_index_two()
    for _ in range(10):
        g, h = random_word(rng, 2), random_word(rng, 2)
        x = int(rng.integers(D.index))
        assert check_chi_law(D, g, h, x)
        assert check_chi_defining(D, g, x)


def test_induction_h1_dimensions():
    D = f2_index_two()
    r = induction_h1_check(Representation.trivial(D.sub_group), D)
    assert r["pass"] and r["dim_H_subgroup"] == r["dim_H_induced"] == 3
    D2 = two_z()
    r = induction_h1_check(Representation(D2.sub_group, [[[-1]]], True), D2)
    assert r["pass"] and r["dim_H_subgroup"] == r["dim_H_induced"] == 0
    r = induction_h1_check(Representation.trivial(D2.sub_group), D2)
    assert r["pass"] and r["dim_H_induced"] == 1 == h1(Representation.trivial(Z)).dim_H


def test_induce_cocycle():
    D = two_z()
    triv = Representation.trivial(D.sub_group)
    zero = induce_cocycle(InhomCocycle.zero(triv), D)
    assert all(la.is_zero(v) for v in zero.values)
    b = induce_cocycle(InhomCocycle(triv, [[1]]), D)
    v = b.values[0]
    assert sorted(int(t) for t in v) == [0, 1]


def test_stages_on_integers():
    outer = two_z()
    Lam = outer.sub_group
    inner = coset_transversal(Lam, Subgroup(Lam, [Lam.parse(f"{Lam.names[0]}^2")]))
    assert inner.index == 2
    for base in (Representation(inner.sub_group, [[[-1]]], True), Representation.trivial(inner.sub_group, 2)):
        r = stages_equivalence(base, outer, inner)
        assert r["pass"] and r["composite_equal"] and r["dim"] == 4 * base.dim
        assert r.get("fresh_transversal_equivalent", True)


def test_transversal_errors():
    with pytest.raises(NotFiniteIndex):
        coset_transversal(F2, Subgroup(F2, [F2.parse("a")]))
    with pytest.raises(NotFiniteIndex):
        coset_transversal(Z, Subgroup(Z, []))
    Z2 = FreeAbelianGroup(2, ["a", "b"])
    with pytest.raises(UnsupportedFamily):
        coset_transversal(Z2, Subgroup(Z2, [Z2.parse("a^2"), Z2.parse("b")]))


def test_s3_table_transversal():
    S3 = permutation_group([[1, 0, 2], [1, 2, 0]], ["s", "t"])
    D = coset_transversal(S3, Subgroup(S3, [S3.parse("s")]))
    assert D.index == 3
    elems = {S3.elem(r) for r in D.reps}
    assert len(elems) == 3
    r = induction_h1_check(Representation(D.sub_group, [[[-1]]], True), D)
    assert r["pass"] and r["dim_H_induced"] == 0
    rng = np.random.default_rng(0)
    for _ in range(30):
        assert check_chi_law(D, random_word(rng, 2), random_word(rng, 2), int(rng.integers(3)))
