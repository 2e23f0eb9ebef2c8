"""Compression, center reductions, nilpotent reduction and product theorems.

Every routine computes both sides of a statement independently and returns
a report with the checks it performed.  Hypotheses are hard gates unless
``force`` is set.
"""
from __future__ import annotations

from itertools import product as iproduct

import numpy as np

from . import linalg as la
from .cohomology import (BarComplex, InhomCocycle, apply_differential, coboundary_map,
                         coboundary_membership, cocycle_basis, expand_word_cocycle, h1, hn,
                         harmonic_projection_matrix, is_cocycle, z1_space)
from .errors import HypothesisFailed, PreconditionFailed, UnsupportedFamily
from .groups import (FiniteSupportMeasure, FiniteTableGroup, FreeAbelianGroup, Group,
                     HeisenbergGroup, ProductGroup, Subgroup, abelianization_map, center,
                     centralizer_contains, convolve, lower_central_series, quotient,
                     subgroup_contains)
from .reps import (Representation, almost_invariant_margin, certificate, certified_norm,
                   fixed_space, laplacian, markov_operator, restrict_representation,
                   subrepresentation)
from .stationarity import cesaro_projection
from .words import Word


def float_rep(rho: Representation) -> Representation:
    if not rho.exact:
        return rho
    return Representation(rho.group, [la.as_float(m) for m in rho.images], exact=False, dim=rho.dim)


def _align(rho: Representation, *arrays):
    """Use float arithmetic throughout as soon as one ingredient is float."""
    if rho.exact and all(la.is_exact(a) for a in arrays):
        return (rho,) + arrays
    return (float_rep(rho),) + tuple(la.as_float(a) for a in arrays)


def _tol(exact: bool, scale: float = 1.0) -> float:
    return 0.0 if exact else 1e-8 * (1 + scale)


# -- restriction and compression ---------------------------------------------

def restrict_cocycle(b: InhomCocycle, N: Subgroup) -> InhomCocycle:
    """Cocycle over N's abstract group with values beta(t) on N's generators."""
    rho_N = restrict_representation(b.rep, N)
    _, emb = N.as_group()
    return InhomCocycle(rho_N, [expand_word_cocycle(b, t) for t in emb.images])


def _check_support(G: Group, C: Subgroup, mu: FiniteSupportMeasure):
    for w in mu.support():
        if subgroup_contains(G, C, w) is False:
            raise PreconditionFailed(f"measure atom {G.fmt(w)} is not in {C.label or 'C'}")


def emu_compress_cocycle(G: Group, N: Subgroup, C: Subgroup, mu: FiniteSupportMeasure,
                         rho: Representation, b: InhomCocycle, force: bool = False) -> dict:
    """E_mu o b|_N is a cocycle in V^mu and differs from b|_N by a coboundary."""
    if not centralizer_contains(G, C, N) and not force:
        raise PreconditionFailed("C does not centralize N")
    _check_support(G, C, mu)
    E = cesaro_projection(rho, mu).E
    bN = restrict_cocycle(b, N)
    rN, E = _align(bN.rep, E)
    vals = [la.coerce(v, rN.exact) for v in bN.values]
    comp = InhomCocycle(rN, [E @ v for v in vals])
    diff = InhomCocycle(rN, [v - E @ v for v in vals])
    ok_cocycle, rel_res = is_cocycle(comp)
    D = la.eye(rho.dim, rN.exact) - la.coerce(markov_operator(rho, mu), rN.exact)
    in_fixed = max((la.max_abs(D @ v) for v in comp.values), default=0.0)
    mem = coboundary_membership(diff)
    scale = la.max_abs(b.vector())
    resid = 0.0
    if mem.primitive is not None:
        resid = la.max_abs(coboundary_map(rN) @ mem.primitive - diff.vector())
    ok = (ok_cocycle and mem.is_coboundary and in_fixed <= _tol(rN.exact, scale)
          and resid <= _tol(rN.exact, scale))
    return {"pass": bool(ok), "compressed": comp, "primitive": mem.primitive, "membership": mem.status,
            "relator_residual": rel_res, "fixed_residual": in_fixed, "residual": resid}


def emu_compress_cocycle_deg2(G: FiniteTableGroup, N: Subgroup, C: Subgroup, mu, rho, F) -> dict:
    """Degree-2 compression on a finite group via bar complexes.

    ``F`` are the bar coordinates of a 2-cocycle (an element of C^3(G, V)^G).
    """
    if not centralizer_contains(G, C, N):
        raise PreconditionFailed("C does not centralize N")
    _check_support(G, C, mu)
    E = cesaro_projection(rho, mu).E
    A, emb = N.as_group()
    rho_N = restrict_representation(rho, N)
    rho_N, E, F = _align(rho_N, E, F)
    bcG = BarComplex(rho if rho_N.exact else float_rep(rho))
    bcN = BarComplex(rho_N)
    elem = [G.elem(emb(A.word_of(a))) for a in range(A.order)]
    d = rho.dim
    FN = la.zeros((bcN.dim(3),), rho_N.exact)
    for t in iproduct(range(A.order), repeat=2):
        k = bcN._index(t)
        kg = bcG._index(tuple(elem[x] for x in t))
        FN[k * d : (k + 1) * d] = F[kg * d : (kg + 1) * d]
    comp = la.zeros(FN.shape, rho_N.exact)
    for k in range(A.order ** 2):
        comp[k * d : (k + 1) * d] = E @ FN[k * d : (k + 1) * d]
    cocycle_res = la.max_abs(apply_differential(bcN, 3, comp))
    diff = FN - comp
    D2 = bcN.dense(2)
    h = la.solve(D2, diff)
    resid = float("inf") if h is None else la.max_abs(D2 @ h - diff)
    scale = la.max_abs(F)
    ok = h is not None and cocycle_res <= _tol(rho_N.exact, scale) and resid <= _tol(rho_N.exact, scale)
    return {"pass": bool(ok), "cocycle_residual": cocycle_res, "residual": resid, "primitive": h}


# -- h_c homotopy ------------------------------------------------------------

def hc_homotopy(b: InhomCocycle, c: Word, N: Subgroup | None = None) -> dict:
    """Degree one: h_c(b)(g) = b(g, gc), i.e. the constant-value cochain beta(c).

    Checks (1 - rho_c) o b|_N against the coboundary of h_c(b)|_N on the
    generators of N; the identity holds with a minus sign,
    (1 - rho_c) beta(t) = -(rho_t h - h) with h = beta(c).
    """
    rho = b.rep
    G = rho.group
    gens = G.gens() if N is None else list(N.generators)
    h = expand_word_cocycle(b, c)
    Rc = rho.of(c)
    worst = 0.0
    for t in gens:
        if G.has_normal_form and not G.commute(t, c):
            raise PreconditionFailed(f"{G.fmt(c)} does not commute with {G.fmt(t)}")
        lhs = expand_word_cocycle(b, t) - Rc @ expand_word_cocycle(b, t)
        dh = rho.of(t) @ h - h
        worst = max(worst, la.max_abs(lhs + dh))
    ok = worst <= _tol(rho.exact, la.max_abs(b.vector()))
    return {"pass": bool(ok), "h": h, "residual": worst, "sign": -1}


def hc_homotopy_bar(rho: Representation, F: np.ndarray, n: int, c: int, N_elems=None) -> dict:
    """Degree n on a finite group, all tuples of N^(n+1).

    f in C^(n+1) is a cocycle, (h_c f)(g_1..g_n) = sum_i (-1)^(i+1)
    f(g_1, .., g_i, g_i c, .., g_n c).  On N-tuples the identity holds as
    (1 - rho_c) f = -d(h_c f); the residual for the opposite sign is
    reported as well.
    """
    G = rho.group
    bc = BarComplex(rho)
    T = G.table
    N_elems = list(range(G.order)) if N_elems is None else sorted(N_elems)
    for x in N_elems:
        if T[x, c] != T[c, x]:
            raise PreconditionFailed("c does not centralize N")
    from .cohomology import bar_cochain_value

    def f(tup):
        return bar_cochain_value(bc, F, tup)

    def hcf(tup):
        acc = la.zeros((rho.dim,), rho.exact)
        for i in range(len(tup)):
            args = tup[: i + 1] + tuple(int(T[g, c]) for g in tup[i:])
            term = f(args)
            acc = acc + term if i % 2 == 0 else acc - term
        return acc

    def dh(tup):
        acc = la.zeros((rho.dim,), rho.exact)
        for i in range(len(tup)):
            term = hcf(tup[:i] + tup[i + 1 :])
            acc = acc + term if i % 2 == 0 else acc - term
        return acc

    Rc = rho.of_element(c)
    worst = {1: 0.0, -1: 0.0}
    for tup in iproduct(N_elems, repeat=n + 1):
        lhs = f(tup) - Rc @ f(tup)
        r = dh(tup)
        for s in (1, -1):
            worst[s] = max(worst[s], la.max_abs(lhs - s * r))
    s = -1
    ok = worst[s] <= _tol(rho.exact, la.max_abs(F))
    return {"pass": bool(ok), "sign": s, "residual": worst[s], "residual_other_sign": worst[-s]}


# -- complementation ----------------------------------------------------------

def _restriction_matrix(rho: Representation, N: Subgroup) -> np.ndarray:
    """Linear map from stacked G-generator values to stacked N-generator values."""
    _, emb = N.as_group()
    from .cohomology import fox_jacobian
    if not emb.images:
        return la.zeros((0, rho.dim * rho.group.ngens), rho.exact)
    return np.vstack([fox_jacobian(rho, t) for t in emb.images])


def complemented_b1(G: Group, N: Subgroup, C: Subgroup, mu, rho: Representation, force: bool = False) -> dict:
    """P = (1 - E_mu) on restricted cocycles is a projection onto B^1(N, V_0)."""
    if not centralizer_contains(G, C, N) and not force:
        raise PreconditionFailed("C does not centralize N")
    _check_support(G, C, mu)
    E = cesaro_projection(rho, mu).E
    Zg = z1_space(rho)
    Rm = _restriction_matrix(rho, N)
    rho2, E, Zg, Rm = _align(rho, E, Zg, Rm)
    exact = rho2.exact
    kN = len(N.as_group()[1].images)
    d = rho.dim
    res = Rm @ Zg if Zg.shape[1] else la.zeros((kN * d, 0), exact)
    I = la.eye(d, exact)
    P = la.kron_eye(kN, I - E)
    img = la.column_space(P @ res) if res.shape[1] else res
    tol = _tol(exact)
    idem = la.is_zero(P @ P - P, tol)
    # B^1(N, V_0) with V_0 = im(Delta)
    D = la.coerce(laplacian(rho, mu), exact)
    V0 = la.column_space(D)
    rho_N = restrict_representation(rho2, N)
    CN = coboundary_map(rho_N)
    BV0 = la.column_space(CN @ V0) if V0.shape[1] and CN.shape[0] else la.zeros((kN * d, 0), exact)
    first = la.same_span(img, BV0, 1e-7) if img.shape[1] or BV0.shape[1] else True
    Vmu = la.nullspace(D)
    VN = fixed_space(rho2, N)
    second = None
    if la.in_span(VN, Vmu, 1e-8) if Vmu.shape[1] else True:
        BN = la.column_space(CN) if CN.shape[0] else la.zeros((0, 0), exact)
        second = la.same_span(img, BN, 1e-7) if img.shape[1] or BN.shape[1] else True
    ok = idem and first and (second is not False)
    return {"pass": bool(ok), "idempotent": bool(idem), "rank_P": img.shape[1],
            "dim_B1_N_V0": BV0.shape[1], "image_is_B1_N_V0": bool(first),
            "second_clause": second}


# -- center decomposition ---------------------------------------------------

def _central_measure_check(G: Group, mu: FiniteSupportMeasure):
    Zs = center(G)
    for w in mu.support():
        if G.has_normal_form and not all(G.commute(w, s) for s in G.gens()):
            raise PreconditionFailed(f"atom {G.fmt(w)} is not central")
    return Zs


def _values_in(rows: int, k: int, basis: np.ndarray) -> np.ndarray:
    """Stacked embedding of k copies of a subspace basis."""
    return la.kron_eye(k, basis)


def center_zn_decomposition(G: Group, mu: FiniteSupportMeasure, rho: Representation, n: int = 1) -> dict:
    """Z^n(G, V) = B^n(G, V_0) + Z^n(G, V^mu) for a central measure."""
    _central_measure_check(G, mu)
    Ep = cesaro_projection(rho, mu).E
    D = laplacian(rho, mu)
    rho2, E, D = _align(rho, Ep, D)
    exact = rho2.exact
    V0, Vmu = la.column_space(D), la.nullspace(D)
    d = rho.dim
    if n == 1:
        Z = z1_space(rho2)
        k = G.ngens
        CG = coboundary_map(rho2)
        B0 = la.column_space(CG @ V0) if V0.shape[1] else la.zeros((k * d, 0), exact)
        emb = _values_in(k * d, k, Vmu)
        Zmu = la.intersect(Z, emb) if Z.shape[1] and emb.shape[1] else la.zeros((k * d, 0), exact)
        blockE = la.kron_eye(k, E)
        sub = subrepresentation(rho2, Vmu) if Vmu.shape[1] else None
        h_left = h1(rho2).dim_H
        h_right = h1(sub).dim_H if sub is not None else 0
    elif n == 2 and isinstance(G, FiniteTableGroup):
        bc = BarComplex(rho2)
        Z = bc.kernel(3)
        m = G.order ** 2
        D2 = bc.dense(2)
        B0 = la.column_space(D2 @ la.kron_eye(G.order, V0)) if V0.shape[1] else la.zeros((m * d, 0), exact)
        emb = la.kron_eye(m, Vmu)
        Zmu = la.intersect(Z, emb) if Z.shape[1] and emb.shape[1] else la.zeros((m * d, 0), exact)
        blockE = la.kron_eye(m, E)
        k = m
        h_left = hn(rho2, 2).dim_H
        h_right = hn(subrepresentation(rho2, Vmu), 2).dim_H if Vmu.shape[1] else 0
    else:
        raise UnsupportedFamily("degree 2 needs a finite table group; higher degrees unsupported")
    rows = Z.shape[0]
    both = la.hstack([B0, Zmu], rows, exact)
    direct = both.shape[1] == 0 or la.rank(both) == B0.shape[1] + Zmu.shape[1]
    spans = la.same_span(both, Z, 1e-7) if both.shape[1] or Z.shape[1] else True
    # the splitting is realized by b -> E o b
    tol = _tol(exact)
    realized = True
    if Z.shape[1]:
        EZ = blockE @ Z
        realized = la.in_span(Zmu, EZ, 1e-7) if Zmu.shape[1] else la.is_zero(EZ, tol)
        rest = Z - EZ
        realized = realized and (la.in_span(B0, rest, 1e-7) if B0.shape[1] else la.is_zero(rest, tol))
    ok = direct and spans and realized and h_left == h_right
    return {"pass": bool(ok), "degree": n, "dim_Z": Z.shape[1], "dim_B_V0": B0.shape[1],
            "dim_Z_Vmu": Zmu.shape[1], "direct": bool(direct), "spans": bool(spans),
            "realized_by_E": bool(realized), "dim_H": h_left, "dim_H_Vmu": h_right}


def center_quotient_h1(G: Group, mu: FiniteSupportMeasure, rho: Representation, force: bool = False) -> dict:
    """H^1(G, V) = H^1(G/Z, V^Z) when V^G = 0 and mu is central."""
    if fixed_space(rho).shape[1] and not force:
        raise PreconditionFailed("V^G is nonzero")
    Zs = _central_measure_check(G, mu)
    # the section Z x Z -> Z must be measurable; every map between discrete groups is
    measurable_section = True
    Vmu = la.nullspace(laplacian(rho, mu))
    VZ = fixed_space(rho, Zs)
    rho2, Vmu, VZ = _align(rho, Vmu, VZ)
    same_fixed = la.same_span(Vmu, VZ, 1e-7) if Vmu.shape[1] or VZ.shape[1] else True
    Q, pi, lifts = quotient(G, Zs)
    # V^Z as a module over G/Z
    subG = subrepresentation(rho2, VZ) if VZ.shape[1] else None
    if subG is not None:
        rq = Representation(Q, [subG.of(w) for w in lifts], subG.exact, dim=subG.dim)
        hq = h1(rq)
    else:
        rq, hq = None, None
    hg = h1(rho2)
    # compressed cocycles vanish on the central generators
    E = cesaro_projection(rho2, mu).E
    worst = 0.0
    for b in cocycle_basis(rho2, hg.Z):
        for z in Zs.generators:
            worst = max(worst, la.max_abs(E @ expand_word_cocycle(b, z)))
    constant = worst <= _tol(rho2.exact)
    dim_q = hq.dim_H if hq is not None else 0
    ok = measurable_section and same_fixed and constant and hg.dim_H == dim_q
    return {"pass": bool(ok), "dim_H_G": hg.dim_H, "dim_H_quotient": dim_q, "measurable_section": measurable_section,
            "Vmu_equals_VZ": bool(same_fixed), "constant_on_cosets": bool(constant),
            "quotient": Q.describe()}


def factor_through_center(G: Group, mu: FiniteSupportMeasure, rho: Representation, b: InhomCocycle) -> dict:
    """E_mu o b descends to G/Z, or a central generator witnesses that it does not."""
    Zs = _central_measure_check(G, mu)
    E = cesaro_projection(rho, mu).E
    rho2, E = _align(rho, E)
    bb = InhomCocycle(rho2, [la.coerce(v, rho2.exact) for v in b.values])
    tol = _tol(rho2.exact, la.max_abs(b.vector()))
    for z in Zs.generators:
        val = E @ expand_word_cocycle(bb, z)
        if la.max_abs(val) > tol:
            return {"factors": False, "generator": G.fmt(z), "value": la.to_jsonable(val)}
    Q, pi, lifts = quotient(G, Zs)
    vals = [E @ expand_word_cocycle(bb, w) for w in lifts]
    return {"factors": True, "quotient": Q.describe(), "values": [la.to_jsonable(v) for v in vals]}


# -- nilpotent reduction ------------------------------------------------------

def _uniform_symmetric(G: Group, H: Subgroup) -> FiniteSupportMeasure:
    words = []
    for t in H.generators:
        words += [t, t.inverse()]
    return FiniteSupportMeasure.uniform(G, words)


def _stage_projection(rho: Representation) -> tuple[np.ndarray, np.ndarray]:
    """Composite projection V -> V^[G,G] down the lower central series."""
    G = rho.group
    series = lower_central_series(G)
    if not series[-1].is_trivial():
        raise UnsupportedFamily("group is not nilpotent")
    exact = rho.exact
    d = rho.dim
    Pi = la.eye(d, exact)
    M = la.eye(d, exact)  # basis of the current module
    for N in reversed(series[1:-1]):
        sub = subrepresentation(rho, M)
        mu = _uniform_symmetric(G, N)
        Ei = cesaro_projection(sub, mu).E
        sub2, Ei, M = _align(sub, Ei, M)
        exact = sub2.exact
        Pi = la.coerce(Pi, exact)
        # coordinates of Pi-images in M, projected, mapped back
        coords = la.solve(M, Pi) if exact else np.linalg.lstsq(M, Pi, rcond=None)[0]
        Pi = M @ (Ei @ coords)
        newM = la.column_space(M @ Ei) if M.shape[1] else M
        if newM.shape[1] == 0:
            return Pi, newM
        M = newM
    return Pi, M


def nilpotent_reduction(rho: Representation) -> dict:
    """Z^1(G, V) = Z^1(G^ab, V^[G,G]) + W with W made of coboundaries."""
    G = rho.group
    if not isinstance(G, (FreeAbelianGroup, HeisenbergGroup, FiniteTableGroup)):
        raise UnsupportedFamily(f"nilpotent reduction not available for {G.family}")
    Pi, M = _stage_projection(rho)
    rho2, Pi, M = _align(rho, Pi, M)
    exact = rho2.exact
    series = lower_central_series(G)
    VD = fixed_space(rho2, series[1]) if len(series) > 1 else rho2.eye()
    module_ok = la.same_span(M, VD, 1e-7) if M.shape[1] or VD.shape[1] else True
    Ab, pi = abelianization_map(G)
    if isinstance(G, FiniteTableGroup):
        lifts = G.gens()
    elif isinstance(G, HeisenbergGroup):
        lifts = [Word.gen(0), Word.gen(1)]
    else:
        lifts = G.gens()
    if VD.shape[1]:
        sub = subrepresentation(rho2, VD)
        r_ab = Representation(Ab, [sub.of(w) for w in lifts], sub.exact, dim=sub.dim)
        s_ab = h1(r_ab)
    else:
        r_ab, s_ab = None, None
    sG = h1(rho2)
    Z = sG.Z
    k = G.ngens
    blockPi = la.kron_eye(k, Pi)
    PZ = blockPi @ Z if Z.shape[1] else Z
    W = Z - PZ if Z.shape[1] else Z
    Wb = la.column_space(W) if W.shape[1] else W
    # every W element is a coboundary
    prim_ok = all(coboundary_membership(c).is_coboundary for c in cocycle_basis(rho2, Wb))
    # Pi o b vanishes on [G,G] generators, so it descends to G^ab
    descends = True
    for c in cocycle_basis(rho2, la.column_space(PZ) if PZ.shape[1] else PZ):
        for t in series[1].generators if len(series) > 1 else []:
            if la.max_abs(expand_word_cocycle(c, t)) > _tol(exact):
                descends = False
    dim_Z_ab = s_ab.dim_Z if s_ab else 0
    dim_H_ab = s_ab.dim_H if s_ab else 0
    dims_ok = sG.dim_Z == dim_Z_ab + Wb.shape[1] and sG.dim_H == dim_H_ab
    second = None
    VG = fixed_space(rho2)
    if la.same_span(VD, VG, 1e-7) if VD.shape[1] or VG.shape[1] else True:
        second = la.same_span(Wb, sG.B, 1e-7) if Wb.shape[1] or sG.B.shape[1] else True
    ok = module_ok and prim_ok and descends and dims_ok and second is not False
    return {"pass": bool(ok), "dim_Z_G": sG.dim_Z, "dim_H_G": sG.dim_H, "dim_Z_ab": dim_Z_ab,
            "dim_H_ab": dim_H_ab, "dim_W": Wb.shape[1], "dim_V_commutator_fixed": VD.shape[1],
            "W_coboundaries": bool(prim_ok), "descends": bool(descends), "second_clause": second,
            "W": Wb}


def restriction_to_center_vanishes(rho: Representation) -> dict:
    """For the Heisenberg group: every cocycle restricted to <z> is a coboundary there."""
    G = rho.group
    if not isinstance(G, HeisenbergGroup):
        raise UnsupportedFamily("needs the Heisenberg group")
    Zs = Subgroup(G, [Word.gen(2)], "<z>")
    s = h1(rho)
    bad = 0
    for b in cocycle_basis(rho, s.Z):
        if not coboundary_membership(restrict_cocycle(b, Zs)).is_coboundary:
            bad += 1
    return {"pass": bad == 0, "checked": s.dim_Z, "failures": bad}


# -- product theorems --------------------------------------------------------

def _factor_rep(rho: Representation, G: ProductGroup, side: int) -> Representation:
    H = G.left if side == 0 else G.right
    imgs = rho.images[: G.split] if side == 0 else rho.images[G.split :]
    return Representation(H, imgs, rho.exact, dim=rho.dim)


def _embed_measure(G: ProductGroup, mu: FiniteSupportMeasure, side: int) -> FiniteSupportMeasure:
    if mu.group is G:
        return mu
    f = G.embed_left if side == 0 else G.embed_right
    return FiniteSupportMeasure(G, [(f(w), p) for w, p in mu.items()])


def _class_rank(images: np.ndarray, B: np.ndarray, exact: bool) -> int:
    rows = images.shape[0]
    both = la.hstack([images, B], rows, exact)
    rb = la.rank(B) if B.shape[1] else 0
    return (la.rank(both) if both.shape[1] else 0) - rb


def product_h1_iso(G: ProductGroup, rho: Representation, mu1, mu2, force: bool = False) -> dict:
    """H^1(G1 x G2, V) = H^1(G1, V^G2) + H^1(G2, V^G1) under the spectral hypotheses."""
    m1, m2 = _embed_measure(G, mu1, 0), _embed_measure(G, mu2, 1)
    nu = convolve(m1, m2)
    T = markov_operator(rho, nu)
    nrm = certified_norm(rho, T)
    r1, r2 = _factor_rep(rho, G, 0), _factor_rep(rho, G, 1)
    VG1, VG2 = fixed_space(r1), fixed_space(r2)
    Vm1, Vm2 = la.nullspace(laplacian(rho, m1)), la.nullspace(laplacian(rho, m2))
    checks = {
        "markov_norm": nrm,
        "markov_norm_lt_1": nrm < 1 - 1e-12,
        "Vmu1_eq_VG1": bool(la.same_span(Vm1, VG1, 1e-7)) if Vm1.shape[1] or VG1.shape[1] else True,
        "Vmu2_eq_VG2": bool(la.same_span(Vm2, VG2, 1e-7)) if Vm2.shape[1] or VG2.shape[1] else True,
        "certified": certificate(rho) is not None,
    }
    for name in ("markov_norm_lt_1", "Vmu1_eq_VG1", "Vmu2_eq_VG2"):
        if not checks[name] and not force:
            raise HypothesisFailed(f"hypothesis {name} fails", check=name)
    P = harmonic_projection_matrix(rho, nu)
    rho2, P, VG1, VG2 = _align(rho, P, VG1, VG2)
    exact = rho2.exact
    r1, r2 = _factor_rep(rho2, G, 0), _factor_rep(rho2, G, 1)
    sG = h1(rho2)
    s1 = h1(subrepresentation(r1, VG2)) if VG2.shape[1] else None
    s2 = h1(subrepresentation(r2, VG1)) if VG1.shape[1] else None
    d, k1 = rho.dim, G.split
    k2 = G.ngens - k1
    tol = 1e-7

    def forward(x):
        """Stacked G-cocycle -> (coords over G1 in V^G2, coords over G2 in V^G1)."""
        y = x - P @ x  # harmonic representative
        c1 = [la.coordinates(VG2, y[i * d : (i + 1) * d]) if VG2.shape[1] else la.zeros((0,), exact)
              for i in range(k1)]
        c2 = [la.coordinates(VG1, y[(k1 + j) * d : (k1 + j + 1) * d]) if VG1.shape[1] else la.zeros((0,), exact)
              for j in range(k2)]
        if any(c is None for c in c1 + c2):
            return None
        z1 = np.concatenate(c1) if c1 else la.zeros((0,), exact)
        z2 = np.concatenate(c2) if c2 else la.zeros((0,), exact)
        return z1, z2

    def inverse(z1, z2):
        a1, a2 = VG2.shape[1], VG1.shape[1]
        vals = [VG2 @ z1[i * a1 : (i + 1) * a1] if a1 else la.zeros((d,), exact) for i in range(k1)]
        vals += [VG1 @ z2[j * a2 : (j + 1) * a2] if a2 else la.zeros((d,), exact) for j in range(k2)]
        return np.concatenate(vals) if vals else la.zeros((0,), exact)

    def mod_B(vec, B):
        if B is None or B.shape[1] == 0:
            return la.is_zero(vec, 1e-8 * (1 + la.max_abs(vec))) if not exact else la.is_zero(vec)
        return la.in_span(B, vec, tol)

    ok_fwd_inv = True
    # forward o inverse on factor representatives
    H1 = s1.H if s1 else la.zeros((0, 0), exact)
    H2 = s2.H if s2 else la.zeros((0, 0), exact)
    reps = [(H1[:, j], la.zeros((H2.shape[0],), exact)) for j in range(H1.shape[1])]
    reps += [(la.zeros((H1.shape[0],), exact), H2[:, j]) for j in range(H2.shape[1])]
    for z1, z2 in reps:
        x = inverse(z1, z2)
        if not is_cocycle(InhomCocycle.from_vector(rho2, x))[0]:
            ok_fwd_inv = False
            continue
        out = forward(x)
        if out is None:
            ok_fwd_inv = False
            continue
        if s1 is not None and not mod_B(out[0] - z1, s1.B):
            ok_fwd_inv = False
        if s2 is not None and not mod_B(out[1] - z2, s2.B):
            ok_fwd_inv = False
    ok_inv_fwd = True
    for j in range(sG.H.shape[1]):
        x = sG.H[:, j]
        out = forward(x)
        if out is None:
            ok_inv_fwd = False
            continue
        back = inverse(*out)
        if not mod_B(back - x, sG.B):
            ok_inv_fwd = False
    dim1 = s1.dim_H if s1 else 0
    dim2 = s2.dim_H if s2 else 0
    ok = ok_fwd_inv and ok_inv_fwd and sG.dim_H == dim1 + dim2
    return {"pass": bool(ok), "hypotheses": checks, "dim_H_G": sG.dim_H, "dim_H_G1_VG2": dim1,
            "dim_H_G2_VG1": dim2, "forward_inverse": bool(ok_fwd_inv), "inverse_forward": bool(ok_inv_fwd)}


def product_h1_embedding(G: ProductGroup, rho: Representation, mu1, mu2, force: bool = False) -> dict:
    """[b] -> [E_mu2 o b|G1] + [E_mu1 o b|G2] is injective when rho|G1 has no almost invariant vectors."""
    m1, m2 = _embed_measure(G, mu1, 0), _embed_measure(G, mu2, 1)
    r1 = _factor_rep(rho, G, 0)
    cert = certificate(rho)
    kappa = almost_invariant_margin(r1, cert=cert) if cert is not None else 0.0
    if kappa <= 0 and not force:
        raise HypothesisFailed("rho restricted to G1 has almost invariant vectors (kappa = 0)", check="kappa")
    E1 = cesaro_projection(rho, m1).E
    E2 = cesaro_projection(rho, m2).E
    rho2, E1, E2 = _align(rho, E1, E2)
    exact = rho2.exact
    r1, r2 = _factor_rep(rho2, G, 0), _factor_rep(rho2, G, 1)
    Vm1, Vm2 = la.column_space(E1), la.column_space(E2)
    sG = h1(rho2)
    t1 = h1(subrepresentation(r1, Vm2)) if Vm2.shape[1] else None
    t2 = h1(subrepresentation(r2, Vm1)) if Vm1.shape[1] else None
    d, k1 = rho.dim, G.split
    k2 = G.ngens - k1
    a1, a2 = Vm2.shape[1], Vm1.shape[1]
    cols = []
    for j in range(sG.H.shape[1]):
        x = sG.H[:, j]
        c1 = [la.coordinates(Vm2, E2 @ x[i * d : (i + 1) * d]) for i in range(k1)] if a1 else []
        c2 = [la.coordinates(Vm1, E1 @ x[(k1 + i) * d : (k1 + i + 1) * d]) for i in range(k2)] if a2 else []
        cols.append(np.concatenate([np.asarray(c, dtype=object if exact else float) for c in c1 + c2])
                    if c1 + c2 else la.zeros((0,), exact))
    rows = k1 * a1 + k2 * a2
    Img = np.column_stack(cols) if cols and rows else la.zeros((rows, len(cols)), exact)
    B1 = t1.B if t1 else la.zeros((0, 0), exact)
    B2 = t2.B if t2 else la.zeros((0, 0), exact)
    Bsum = la.zeros((rows, B1.shape[1] + B2.shape[1]), exact)
    Bsum[: B1.shape[0], : B1.shape[1]] = B1
    Bsum[B1.shape[0] :, B1.shape[1] :] = B2
    img_rank = _class_rank(Img, Bsum, exact) if Img.shape[1] else 0
    injective = img_rank == sG.dim_H
    # kernel classes of the map must be coboundaries
    if not injective and Img.shape[1]:
        K = la.nullspace(la.hstack([Img, Bsum], rows, exact))
        kern = sG.H @ K[: Img.shape[1]]
        injective = all(coboundary_membership(c).is_coboundary for c in cocycle_basis(rho2, la.column_space(kern)))
    target = (t1.dim_H if t1 else 0) + (t2.dim_H if t2 else 0)
    VG1, VG2 = fixed_space(r1), fixed_space(r2)
    equal_fixed = (la.same_span(Vm1, VG1, 1e-7) if Vm1.shape[1] or VG1.shape[1] else True) and \
                  (la.same_span(Vm2, VG2, 1e-7) if Vm2.shape[1] or VG2.shape[1] else True)
    surjective = None
    if equal_fixed:
        surjective = img_rank == target
    ok = injective and surjective is not False
    return {"pass": bool(ok), "kappa": kappa, "dim_H_G": sG.dim_H, "image_rank": img_rank,
            "target_dim": target, "injective": bool(injective), "surjective": surjective}
