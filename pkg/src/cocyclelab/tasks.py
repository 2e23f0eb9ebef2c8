"""Task runners for problem documents.

Each runner takes the parsed problem and one task record and returns
``(passed, payload)``.  Library exceptions propagate; the caller turns them
into ``fail`` (a theorem hypothesis or check that does not hold) or
``error`` (anything else) outcomes.
"""
from __future__ import annotations

import random

import numpy as np

from . import linalg as la
from .cohomology import (CONVENTION, InhomCocycle, averaging_primitive, coboundary_membership,
                         harmonic_decomposition, h1, hn)
from .errors import NotDirect, PreconditionFailed, SchemaError, UnsupportedFamily
from .groups import FiniteTableGroup, HeisenbergGroup, ProductGroup, Subgroup, support_subgroup
from .induction import (check_chi_defining, check_chi_law, coset_transversal, induce_cocycle,
                        induce_representation, induction_h1_check, p_integrability_class,
                        stages_equivalence)
from .problem import Problem, build_representation, parse_vector
from .reps import Representation, certificate, certify_isometric, fixed_space, validate_representation
from .stationarity import (cesaro_projection, check_projection, coset_count, gmu_invariance_check,
                           harmonic_function_space, liouville_check, stationary_decomposition,
                           stationary_states, unique_stationarity_equivalence,
                           weak_unique_stationarity_check)
from . import theorems as th
from .words import Word

CHI_TRIPLES = 1000


def _ref(prob: Problem, task: dict, key: str, section: str, required: bool = True):
    if key not in task:
        if required:
            raise PreconditionFailed(f"task {task['type']} needs '{key}'")
        return None
    return prob.get(section, task[key])


def _rep(prob, task, required=True) -> Representation:
    return _ref(prob, task, "rep", "representations", required)


def _measure(prob, task, key="measure", required=True):
    return _ref(prob, task, key, "measures", required)


def _subgroup(prob, task, key, required=True) -> Subgroup:
    return _ref(prob, task, key, "subgroups", required)


def _force(task, opts) -> bool:
    return bool(task.get("force", False) or opts.get("force", False))


# -- groups and representations ----------------------------------------------

def run_validate_rep(prob, task, opts):
    rho = _rep(prob, task)
    rep = validate_representation(rho, opts["tol"])
    cert = certificate(rho)
    rep.update({"dim": rho.dim, "scalars": "rational" if rho.exact else "float",
                "certified": cert is not None, "bound": None if cert is None else cert.bound})
    return True, rep


def run_certify(prob, task, opts):
    rho = _rep(prob, task)
    cert = certify_isometric(rho)
    P = la.as_float(cert.P)
    worst = max((float(np.max(np.abs(m.T @ P @ m - P))) for m in map(la.as_float, rho.images)), default=0.0)
    out = cert.describe()
    out["invariance_residual"] = worst
    return worst <= 1e-8 * (1 + float(np.max(np.abs(P)))), out


# -- cohomology ------------------------------------------------------------------

def run_h1(prob, task, opts):
    s = h1(_rep(prob, task))
    return True, s.describe(_witnesses(task, opts))


def run_hn(prob, task, opts):
    rho = _rep(prob, task)
    if not isinstance(rho.group, FiniteTableGroup):
        raise UnsupportedFamily("bar complexes need a finite group")
    n = task.get("degree", 1)
    s = hn(rho, n, opts["bar_budget"])
    out = s.describe(_witnesses(task, opts))
    ok = True
    if n == 1:
        r = h1(rho)
        out["relator_method"] = {"dim_Z": r.dim_Z, "dim_B": r.dim_B, "dim_H": r.dim_H}
        ok = r.dim_H == s.dim_H
    return ok, out


def run_membership(prob, task, opts):
    b = _ref(prob, task, "cocycle", "cocycles")
    m = coboundary_membership(b)
    out = m.describe()
    out["convention"] = CONVENTION
    ok = m.status != "ambiguous"
    if isinstance(b.rep.group, FiniteTableGroup):
        out["averaging"] = _averaging_crosscheck(b, m)
        ok = ok and out["averaging"]["agrees"]
    return ok, out


def _averaging_crosscheck(b, m) -> dict:
    """The averaged primitive is a primitive and differs from the solver's by a fixed vector."""
    rho = b.rep
    v = averaging_primitive(b)
    tol = 0.0 if rho.exact else 1e-8 * (1 + la.max_abs(b.vector()))
    prim_res = la.max_abs(InhomCocycle.coboundary(rho, v).vector() - b.vector())
    agrees = prim_res <= tol and m.is_coboundary
    if agrees:
        diff = v - m.primitive
        F = fixed_space(rho)
        agrees = la.max_abs(diff) <= tol if F.shape[1] == 0 else la.in_span(F, diff, 1e-7)
    return {"agrees": bool(agrees), "primitive": la.to_jsonable(v), "residual": prim_res}


def run_harmonic(prob, task, opts):
    rho, mu = _rep(prob, task), _measure(prob, task)
    hd = harmonic_decomposition(rho, mu, _force(task, opts))
    return True, hd.describe()


# -- stationarity ----------------------------------------------------------------

def run_cesaro(prob, task, opts):
    rho, mu = _rep(prob, task), _measure(prob, task)
    P = cesaro_projection(rho, mu, min(opts["tol"], 1e-10), opts["max_iter"])
    checks = check_projection(P, rho, mu, opts["tol"])
    checks = {k: (bool(v) if not isinstance(v, float) else v) for k, v in checks.items()}
    exact = la.is_exact(P.E)
    res_ok = checks["residual"] == 0 if exact else checks["residual"] < opts["tol"]
    ok = res_ok and all(v for k, v in checks.items() if k != "residual")
    out = P.describe()
    out["checks"] = checks
    out["rank"] = la.rank(P.E)
    return ok, out


def run_stationary_decomposition(prob, task, opts):
    rho, mu = _rep(prob, task), _measure(prob, task)
    try:
        sd = stationary_decomposition(rho, mu)
        direct, out = True, sd.describe()
    except NotDirect as e:
        direct, out = False, {"direct": False, "witness": e.witness}
    wus = weak_unique_stationarity_check(rho, mu)
    out["pairing"] = wus
    out["agree"] = direct == wus["weakly_uniquely_stationary"]
    return out["agree"], out


def run_harmonic_space(prob, task, opts):
    G = _ref(prob, task, "group", "groups")
    mu = _measure(prob, task)
    if not isinstance(G, FiniteTableGroup):
        raise UnsupportedFamily("harmonic function spaces need a finite group")
    hs = harmonic_function_space(G, mu)
    cc = coset_count(G, mu)
    out = {"dim": hs.dim, "coset_count": cc}
    if _witnesses(task, opts):
        out["basis"] = la.to_jsonable(hs.basis.T)
    return hs.dim == cc, out


def run_liouville(prob, task, opts):
    G = _ref(prob, task, "group", "groups")
    mu = _measure(prob, task)
    if not isinstance(G, FiniteTableGroup):
        raise UnsupportedFamily("the Liouville check needs a finite group")
    out = {"liouville": liouville_check(G, mu, opts["tol"])}
    ok = out["liouville"]
    rho = _rep(prob, task, required=False)
    if rho is not None:
        H = _subgroup(prob, task, "subgroup", required=False) or support_subgroup(G, mu)
        g = gmu_invariance_check(rho, mu, H, tol=1e-8)
        out["invariance"] = {"pass": bool(g["pass"]), "max_residual": g["max_residual"],
                             "subgroup": H.describe()}
        ok = ok and bool(g["pass"])
    return ok, out


def run_stationary_states(prob, task, opts):
    A = _ref(prob, task, "action", "algebra_actions")
    mu = _measure(prob, task)
    st = stationary_states(A, mu)
    eq = unique_stationarity_equivalence(A, mu)
    out = {"affine_dim": st["affine_dim"], "unique": bool(st["unique"]), "point": la.to_jsonable(st["point"]),
           "min_eigenvalue": st["min_eigenvalue"], "equivalence": eq}
    if _witnesses(task, opts):
        out["directions"] = la.to_jsonable(st["directions"].T)
        out["densities"] = [_complex_matrix(D) for D in st["densities"]]
    return bool(eq["pass"]), out


def _complex_matrix(D):
    D = np.asarray(D)
    if np.allclose(D.imag, 0):
        return la.to_jsonable(D.real)
    return [[[float(z.real), float(z.imag)] for z in row] for row in D]


# -- structure theorems ------------------------------------------------------

def run_compress(prob, task, opts):
    N, C = _subgroup(prob, task, "N"), _subgroup(prob, task, "C")
    mu = _measure(prob, task)
    G = N.ambient
    force = _force(task, opts)
    if task.get("degree", 1) == 2:
        rho = _rep(prob, task)
        if not isinstance(G, FiniteTableGroup):
            raise UnsupportedFamily("degree-two compression needs a finite group")
        s = hn(rho, 2, opts["bar_budget"])
        runs = [th.emu_compress_cocycle_deg2(G, N, C, mu, rho, s.Z[:, j]) for j in range(s.dim_Z)]
        out = {"degree": 2, "dim_Z2": s.dim_Z, "passed": sum(r["pass"] for r in runs),
               "max_residual": max((r["residual"] for r in runs), default=0.0)}
        return all(r["pass"] for r in runs), out
    b = _ref(prob, task, "cocycle", "cocycles")
    r = th.emu_compress_cocycle(G, N, C, mu, b.rep, b, force)
    out = {"degree": 1, "membership": r["membership"], "relator_residual": r["relator_residual"],
           "fixed_residual": r["fixed_residual"], "residual": r["residual"],
           "cocycle_norm": float(la.max_abs(b.vector())) if b.vector().size else 0.0,
           "scalars": "rational" if b.rep.exact else "float",
           "compressed": [la.to_jsonable(v) for v in r["compressed"].values],
           "primitive": None if r["primitive"] is None else la.to_jsonable(r["primitive"])}
    hcs = [th.hc_homotopy(b, c, N) for c in C.generators]
    out["homotopy"] = [{"c": G.fmt(c), "pass": h["pass"], "residual": h["residual"], "sign": h["sign"]}
                       for c, h in zip(C.generators, hcs)]
    return r["pass"] and all(h["pass"] for h in hcs), out


def run_complement_b1(prob, task, opts):
    N, C = _subgroup(prob, task, "N"), _subgroup(prob, task, "C")
    rho, mu = _rep(prob, task), _measure(prob, task)
    r = th.complemented_b1(N.ambient, N, C, mu, rho, _force(task, opts))
    return r["pass"], r


def run_center_decompose(prob, task, opts):
    rho, mu = _rep(prob, task), _measure(prob, task)
    r = th.center_zn_decomposition(rho.group, mu, rho, task.get("degree", 1))
    return r["pass"], r


def run_center_quotient(prob, task, opts):
    rho, mu = _rep(prob, task), _measure(prob, task)
    r = th.center_quotient_h1(rho.group, mu, rho, _force(task, opts))
    return r["pass"], r


def run_nilpotent_reduce(prob, task, opts):
    rho = _rep(prob, task)
    r = th.nilpotent_reduction(rho)
    W = r.pop("W")
    if _witnesses(task, opts):
        r["W"] = la.to_jsonable(W.T)
    ok = r["pass"]
    if isinstance(rho.group, HeisenbergGroup):
        rc = th.restriction_to_center_vanishes(rho)
        r["center_restriction"] = rc
        ok = ok and rc["pass"]
    return ok, r


def _product(rho) -> ProductGroup:
    if not isinstance(rho.group, ProductGroup):
        raise PreconditionFailed("product tasks need a representation of a product group")
    return rho.group


def run_product_iso(prob, task, opts):
    rho = _rep(prob, task)
    G = _product(rho)
    r = th.product_h1_iso(G, rho, _measure(prob, task, "mu1"), _measure(prob, task, "mu2"), _force(task, opts))
    return r["pass"], r


def run_product_embed(prob, task, opts):
    rho = _rep(prob, task)
    G = _product(rho)
    r = th.product_h1_embedding(G, rho, _measure(prob, task, "mu1"), _measure(prob, task, "mu2"),
                                _force(task, opts))
    return r["pass"], r


# -- induction ---------------------------------------------------------------

def _transversal(prob, task, opts):
    H = _subgroup(prob, task, "subgroup")
    return coset_transversal(H.ambient, H, task.get("cap", opts["index_cap"]))


def _random_word(rng: random.Random, k: int, n: int) -> Word:
    return Word(tuple((rng.randrange(k), rng.choice((1, -1))) for _ in range(n)))


def chi_law_report(D, triples: int = CHI_TRIPLES, seed: int = 0) -> dict:
    rng = random.Random(seed)
    k = D.ambient.ngens
    bad = 0
    for _ in range(triples):
        g, h = _random_word(rng, k, rng.randrange(1, 7)), _random_word(rng, k, rng.randrange(1, 7))
        x = rng.randrange(D.index)
        if not (check_chi_law(D, g, h, x) and check_chi_defining(D, g, x)):
            bad += 1
    return {"triples": triples, "failures": bad}


def _base_rep(task, D, exact=None) -> Representation:
    A = D.sub_group
    if "base_images" in task:
        return build_representation(A, task["base_images"], exact)
    return Representation.trivial(A, task.get("base_dim", 1))


def run_transversal(prob, task, opts):
    D = _transversal(prob, task, opts)
    out = D.describe()
    out["subgroup_generators"] = [D.ambient.fmt(w) for w in D.embedding.images]
    out["subgroup_names"] = list(D.sub_group.names)
    out["chi_law"] = chi_law_report(D)
    out["integrability"] = p_integrability_class(D)
    return out["chi_law"]["failures"] == 0, out


def run_induce_rep(prob, task, opts):
    D = _transversal(prob, task, opts)
    rho = _base_rep(task, D)
    validate_representation(rho, opts["tol"])
    ind = induce_representation(rho, D, task.get("p", "2"))
    out = {"index": D.index, "dim": ind.rep.dim, "representatives": D.describe()["representatives"],
           "images": {n: la.to_jsonable(m) for n, m in zip(D.ambient.names, ind.rep.images)}}
    P = ind.norm_form()
    ok = True
    if P is not None:
        Pf = la.as_float(P)
        res = max((float(np.max(np.abs(m.T @ Pf @ m - Pf))) for m in map(la.as_float, ind.rep.images)), default=0.0)
        out["block_form_residual"] = res
        ok = res <= 1e-8 * (1 + float(np.max(np.abs(Pf)))) if Pf.size else True
    return ok, out


def run_induce_cocycle(prob, task, opts):
    D = _transversal(prob, task, opts)
    rho = _base_rep(task, D)
    if "base_values" not in task:
        raise PreconditionFailed("induce-cocycle needs base_values")
    b = InhomCocycle(rho, [parse_vector(v, rho.exact) for v in task["base_values"]])
    bt = induce_cocycle(b, D)
    m_sub = coboundary_membership(b)
    m_ind = coboundary_membership(bt)
    out = {"index": D.index, "values": {n: la.to_jsonable(v) for n, v in zip(D.ambient.names, bt.values)},
           "base_membership": m_sub.status, "induced_membership": m_ind.status}
    return m_sub.status == m_ind.status, out


def run_induction_check(prob, task, opts):
    D = _transversal(prob, task, opts)
    rho = _base_rep(task, D)
    r = induction_h1_check(rho, D)
    r["chi_law"] = chi_law_report(D)
    return r["pass"] and r["chi_law"]["failures"] == 0, r


def run_induction_stages(prob, task, opts):
    outer = _transversal(prob, task, opts)
    Lam = outer.sub_group
    if "inner_generators" not in task:
        raise PreconditionFailed("induction-stages needs inner_generators (words over the subgroup's generators)")
    try:
        gens = [Lam.parse(w) for w in task["inner_generators"]]
    except ValueError as e:
        raise SchemaError([("$.inner_generators", str(e))]) from e
    inner = coset_transversal(Lam, Subgroup(Lam, gens, "inner"), task.get("cap", opts["index_cap"]))
    rho = _base_rep(task, inner)
    validate_representation(rho, opts["tol"])
    r = stages_equivalence(rho, outer, inner)
    r["outer_index"], r["inner_index"] = outer.index, inner.index
    return r["pass"], r


def _witnesses(task, opts) -> bool:
    return bool(task.get("witnesses", opts["witnesses"]))


RUNNERS = {
    "validate-rep": run_validate_rep,
    "certify": run_certify,
    "h1": run_h1,
    "hn": run_hn,
    "membership": run_membership,
    "harmonic": run_harmonic,
    "cesaro": run_cesaro,
    "stationary-decomposition": run_stationary_decomposition,
    "harmonic-space": run_harmonic_space,
    "liouville": run_liouville,
    "stationary-states": run_stationary_states,
    "compress": run_compress,
    "complement-b1": run_complement_b1,
    "center-decompose": run_center_decompose,
    "center-quotient": run_center_quotient,
    "nilpotent-reduce": run_nilpotent_reduce,
    "product-iso": run_product_iso,
    "product-embed": run_product_embed,
    "transversal": run_transversal,
    "induce-rep": run_induce_rep,
    "induce-cocycle": run_induce_cocycle,
    "induction-check": run_induction_check,
    "induction-stages": run_induction_stages,
}

# statements printed by ``cocyclelab explain``: (statement, hypotheses checked)
EXPLAIN = {
    "validate-rep": ("Every generator image is invertible and every relator acts as the identity.",
                     ["exact equality for rationals, 2-norm residual below tol for floats"]),
    "certify": ("A positive-definite P with rho_s^T P rho_s = P exists, so rho is uniformly bounded "
                "with sup ||rho_g|| <= sqrt(cond P).", ["averaging over the group for finite groups"]),
    "h1": ("H^1(G, V) = Z^1 / B^1 with Z^1 cut out by the Fox derivatives of the relators.", []),
    "hn": ("H^n(G, V) from the homogeneous bar complex of a finite group; in degree 1 it must agree "
           "with the relator computation.", ["finite group", "complex within the size budget"]),
    "membership": ("Decides whether a 1-cocycle is a coboundary and returns a primitive v with "
                   "beta(s) = v - rho_s v.", []),
    "harmonic": ("Z^1 = B^1 + H^1_mu, where H^1_mu are the cocycles with zero mu-mean, and "
                 "P(b)(s) = v_b - rho_s v_b with v_b = Delta_mu^-1 sum mu(h) beta(h).",
                 ["certified ||rho_mu|| < 1 (override with force)"]),
    "cesaro": ("The Cesaro means of rho_mu converge to a projection E with E^2 = E, rho_mu E = E = E rho_mu, "
               "im E = ker Delta_mu and ker E = im Delta_mu.", ["uniformly bounded representation"]),
    "stationary-decomposition": ("V = im Delta_mu + ker Delta_mu is direct exactly when the dual fixed "
                                 "vectors of the opposite measure pair nondegenerately with V^mu.", []),
    "harmonic-space": ("On a finite group the mu-harmonic functions are the functions constant on the "
                       "left cosets of the subgroup generated by the support; the dimension is the "
                       "number of such cosets.", ["finite group"]),
    "liouville": ("Every mu-harmonic function is invariant under right translation by the support; with "
                  "a representation, E_mu absorbs rho_h for h in the support subgroup.", ["finite group"]),
    "stationary-states": ("Stationary states of a finite group acting on a finite-dimensional matrix "
                          "algebra form an affine set containing the normalized trace; when the fixed "
                          "algebra is the scalars, uniqueness of opposite-stationary states is equivalent "
                          "to weak unique stationarity of the linear action.", ["finite group"]),
    "compress": ("If C centralizes N and mu lives on C, then E_mu o b|_N is a cocycle with values in V^mu "
                 "and differs from b|_N by a coboundary; (1 - rho_c) b|_N = -d(h_c b) for c in C.",
                 ["C centralizes N", "supp mu in C", "degree 2 needs a finite group"]),
    "complement-b1": ("The restriction of Z^1(G, V) to N, followed by 1 - E_mu, is a projection onto "
                      "B^1(N, V_0) with V_0 = im Delta_mu; it equals B^1(N, V) when V^N is inside V^mu.",
                      ["C centralizes N", "supp mu in C"]),
    "center-decompose": ("For a central measure, Z^n(G, V) = B^n(G, V_0) + Z^n(G, V^mu), realized by E_mu.",
                         ["mu central", "degree 2 needs a finite group"]),
    "center-quotient": ("For a central measure and V^G = 0, H^1(G, V) = H^1(G/Z, V^Z).",
                        ["V^G = 0 (override with force)", "mu central"]),
    "nilpotent-reduce": ("For nilpotent G, Z^1(G, V) = Z^1(G^ab, V^[G,G]) + W with W consisting of "
                         "coboundaries; for the Heisenberg group every cocycle restricted to the center "
                         "is a coboundary there.", ["nilpotent family"]),
    "product-iso": ("H^1(G1 x G2, V) = H^1(G1, V^G2) + H^1(G2, V^G1) through the harmonic representative.",
                    ["||rho_mu1 rho_mu2|| < 1", "V^mu1 = V^G1", "V^mu2 = V^G2"]),
    "product-embed": ("[b] -> [E_mu2 o b|G1] + [E_mu1 o b|G2] is injective, and bijective when the "
                      "mu-fixed spaces equal the fixed spaces.", ["rho|G1 has a spectral gap (kappa > 0)"]),
    "transversal": ("A left transversal D with G = D Gamma; chi_D(g, x) is the unique gamma with "
                    "g d_x gamma in D and satisfies chi(gh, x) = chi(h, x) chi(g, y).",
                    ["free group, kZ in Z, or finite group"]),
    "induce-rep": ("(Ind rho)_g xi(x) = rho(chi_D(g^-1, x)) xi(y); the block form of an invariant "
                   "form for rho is invariant for the induced representation.", ["finite index"]),
    "induce-cocycle": ("beta~(g)(x) = beta(chi_D(g^-1, x)) is a cocycle for the induced representation and "
                       "is a coboundary exactly when beta is.", ["finite index"]),
    "induction-check": ("dim H^1(Gamma, rho) = dim H^1(G, Ind rho) and induced classes stay independent.",
                        ["finite index"]),
    "induction-stages": ("Inducing in two stages Gamma <= Lambda <= G equals inducing directly on the composite "
                         "transversal, and is equivalent to induction over a fresh transversal.",
                         ["finite index at both stages"]),
}
