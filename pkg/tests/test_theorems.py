from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cocyclelab import linalg as la
from cocyclelab import theorems as th
from cocyclelab.cohomology import InhomCocycle, expand_word_cocycle, h1, hn, z1_space
from cocyclelab.corpus import _conjugate, rep_heisenberg
from cocyclelab.errors import HypothesisFailed, PreconditionFailed
from cocyclelab.groups import (FiniteSupportMeasure, FreeAbelianGroup, HeisenbergGroup, ProductGroup, Subgroup,
                               cyclic_group, permutation_group)
from cocyclelab.reps import Representation

Z2 = FreeAbelianGroup(2, ["a", "b"])
H = HeisenbergGroup()
R3 = np.array([[-0.5, -np.sqrt(3) / 2], [np.sqrt(3) / 2, -0.5]])


def rotation_rep():
    return Representation(Z2, [R3, np.eye(2)], False)


def heis3():
    """1 + (swap, diag(1,-1)) block: z acts by diag(1, -1, -1)."""
    x = [[1, 0, 0], [0, 0, 1], [0, 1, 0]]
    y = [[1, 0, 0], [0, 1, 0], [0, 0, -1]]
    z = [[1, 0, 0], [0, -1, 0], [0, 0, -1]]
    return Representation(H, [x, y, z], True)


def random_cocycle(rho, rng):
    Zb = z1_space(rho)
    if rho.exact:
        c = la.as_exact([int(v) for v in rng.integers(-3, 4, Zb.shape[1])])
    else:
        c = rng.standard_normal(Zb.shape[1])
    return InhomCocycle.from_vector(rho, Zb @ c)


def test_restriction_examples():
    rho = heis3()
    b = random_cocycle(rho, np.random.default_rng(1))
    same = th.restrict_cocycle(b, Subgroup(H, ["x", "y", "z"]))
    assert all(la.is_zero(u - v) for u, v in zip(same.values, b.values))
    # beta(z) by expanding z = x^-1 y^-1 x y by hand
    X, Y = rho.images[0], rho.images[1]
    Xi, Yi = la.inverse(X), la.inverse(Y)
    bx, by = b.values[0], b.values[1]
    manual = -Xi @ bx + Xi @ (-Yi @ by) + Xi @ Yi @ bx + Xi @ Yi @ X @ by
    bz = th.restrict_cocycle(b, Subgroup(H, ["z"])).values[0]
    assert la.is_zero(bz - manual)
    assert la.is_zero(bz - b.values[2])
    rr = rotation_rep()
    w = np.array([0.0, 0.0])
    b = InhomCocycle(rr, [np.array([1.0, 2.0]), w])
    assert np.allclose(th.restrict_cocycle(b, Subgroup(Z2, ["b"])).values[0], w)


def test_compress_with_trivial_measure():
    rho = heis3()
    b = random_cocycle(rho, np.random.default_rng(2))
    r = th.emu_compress_cocycle(H, Subgroup(H, ["x", "y", "z"]), Subgroup(H, ["z"]), FiniteSupportMeasure.delta(H),
                                rho, b)
    assert r["pass"] and la.is_zero(r["primitive"])


def test_compress_needs_centralizer():
    rho = heis3()
    b = random_cocycle(rho, np.random.default_rng(3))
    with pytest.raises(PreconditionFailed):
        th.emu_compress_cocycle(H, Subgroup(H, ["y"]), Subgroup(H, ["x"]), FiniteSupportMeasure.delta(H, H.parse("x")),
                                rho, b)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 6), st.booleans(), st.sampled_from(["z", "x", "x z"]))
def test_compress_heisenberg_property(seed, d, exact, ngen):
    rng = np.random.default_rng(seed)
    rho = Representation(H, _conjugate(rep_heisenberg(rng, d, exact), rng, exact), exact)
    b = random_cocycle(rho, rng)
    mu = FiniteSupportMeasure(H, {"z": Fraction(1, 3), "z^-1": Fraction(1, 3), "e": Fraction(1, 3)})
    r = th.emu_compress_cocycle(H, Subgroup(H, [ngen]), Subgroup(H, ["z"]), mu, rho, b)
    assert r["pass"]
    assert r["membership"] == "coboundary"
    h = th.hc_homotopy(b, H.parse("z"), Subgroup(H, [ngen]))
    assert h["pass"] and h["sign"] == -1


def test_hc_identity_at_identity_element():
    rho = heis3()
    b = random_cocycle(rho, np.random.default_rng(4))
    r = th.hc_homotopy(b, H.parse("e"))
    assert r["pass"] and r["residual"] == 0


def test_hc_bar_degree_two_on_klein_group():
    K = permutation_group([[1, 0, 2, 3], [0, 1, 3, 2]], ["p", "q"])
    rho = Representation(K, [[[-1]], [[1]]], True)
    s = hn(rho, 2)
    for j in range(s.Z.shape[1]):
        for c in range(K.order):
            r = th.hc_homotopy_bar(rho, s.Z[:, j], 2, c)
            assert r["pass"]


def test_complemented_b1():
    rho = heis3()
    r = th.complemented_b1(H, Subgroup(H, ["x", "y", "z"]), Subgroup(H, ["z"]), FiniteSupportMeasure.delta(H), rho)
    assert r["pass"] and r["rank_P"] == 0
    mu = FiniteSupportMeasure.uniform(H, ["z", "z^-1"])
    r = th.complemented_b1(H, Subgroup(H, ["z"]), Subgroup(H, ["z"]), mu, rho)
    assert r["pass"] and r["second_clause"] is not False


def test_center_decomposition():
    triv = Representation.trivial(Z2, 2)
    mu = FiniteSupportMeasure.uniform(Z2, ["a", "b"])
    r = th.center_zn_decomposition(Z2, mu, triv)
    assert r["pass"] and r["dim_B_V0"] == 0 and r["dim_Z_Vmu"] == r["dim_Z"] == 4
    C4 = cyclic_group(4)
    rho = Representation(C4, [[[-1]]], True)
    r = th.center_zn_decomposition(C4, FiniteSupportMeasure.uniform(C4, ["a"]), rho, n=2)
    assert r["pass"] and r["dim_H"] == r["dim_H_Vmu"] == 0


def test_center_quotient():
    rho = Representation(H, [-np.eye(2), R3, np.eye(2)], False)
    mu = FiniteSupportMeasure.uniform(H, ["z", "z^-1"])
    r = th.center_quotient_h1(H, mu, rho)
    assert r["pass"] and r["dim_H_G"] == r["dim_H_quotient"]
    with pytest.raises(PreconditionFailed):
        th.center_quotient_h1(H, mu, Representation.trivial(H))


def test_factor_through_center():
    rho = heis3()
    b = InhomCocycle(rho, [rho.zeros()] * 3)
    assert th.factor_through_center(H, FiniteSupportMeasure.uniform(H, ["z", "z^-1"]), rho, b)["factors"]
    Z = FreeAbelianGroup(1, ["z"])
    triv = Representation.trivial(Z)
    r = th.factor_through_center(Z, FiniteSupportMeasure.delta(Z, Z.parse("z")), triv, InhomCocycle(triv, [[1]]))
    assert not r["factors"] and r["generator"] == "z"
    # linear growth of beta(z^n) for the undistorted generator
    for n in (1, 4, 9):
        assert expand_word_cocycle(InhomCocycle(triv, [[1]]), Z.parse(f"z^{n}"))[0] == n


def test_nilpotent_reduction():
    r = th.nilpotent_reduction(rotation_rep())
    assert r["pass"] and r["dim_W"] == 0
    r = th.nilpotent_reduction(heis3())
    assert r["pass"] and r["dim_H_G"] == r["dim_H_ab"] and r["W_coboundaries"]
    assert th.restriction_to_center_vanishes(heis3())["pass"]


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 6), st.booleans())
def test_nilpotent_reduction_property(seed, d, exact):
    rng = np.random.default_rng(seed)
    rho = Representation(H, _conjugate(rep_heisenberg(rng, d, exact), rng, exact), exact)
    r = th.nilpotent_reduction(rho)
    assert r["pass"] and r["dim_H_G"] == r["dim_H_ab"]
    assert th.restriction_to_center_vanishes(rho)["pass"]
    assert r["dim_Z_G"] == h1(rho).dim_Z


def _zxz():
    A, B = FreeAbelianGroup(1, ["a"]), FreeAbelianGroup(1, ["b"])
    return A, B, ProductGroup(A, B)


def test_product_rotation_example():
    A, B, G = _zxz()
    rho = Representation(G, [R3, np.eye(2)], False)
    mu1 = FiniteSupportMeasure.uniform(A, ["a", "a^-1"])
    mu2 = FiniteSupportMeasure.delta(B, B.parse("b"))
    r = th.product_h1_iso(G, rho, mu1, mu2)
    assert r["pass"] and r["hypotheses"]["markov_norm"] == pytest.approx(0.5)
    assert (r["dim_H_G"], r["dim_H_G1_VG2"], r["dim_H_G2_VG1"]) == (0, 0, 0)
    e = th.product_h1_embedding(G, rho, mu1, mu2)
    assert e["pass"] and e["kappa"] > 0


def test_product_hypothesis_failures():
    A, B, G = _zxz()
    triv = Representation.trivial(G, 2)
    mu1 = FiniteSupportMeasure.uniform(A, ["a", "a^-1"])
    mu2 = FiniteSupportMeasure.delta(B, B.parse("b"))
    with pytest.raises(HypothesisFailed):
        th.product_h1_iso(G, triv, mu1, mu2)
    with pytest.raises(HypothesisFailed):
        th.product_h1_embedding(G, triv, mu1, mu2)


def test_product_sign_action():
    A, B, G = _zxz()
    # G1 acts by -1 and G2 trivially: the commutator relation kills beta(b), coboundaries absorb beta(a)
    rho = Representation(G, [[[-1]], [[1]]], True)
    mu1 = FiniteSupportMeasure.uniform(A, ["e", "a"])
    mu2 = FiniteSupportMeasure.uniform(B, ["b", "b^-1"])
    r = th.product_h1_iso(G, rho, mu1, mu2)
    assert r["pass"] and (r["dim_H_G"], r["dim_H_G1_VG2"], r["dim_H_G2_VG1"]) == (0, 0, 0)
