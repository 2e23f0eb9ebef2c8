"""Seeded instance corpus as one problem document.

Task ids carry a prefix naming the property family they exercise
(``proj-``, ``harm-``, ``comp-``, ``fin-``, ``prod-``, ``nil-``, ``ind-``,
``liou-``).  Every instance is built from a fixed seed so the document,
and therefore the machine report, is reproducible.

Representations are certified by construction: orthogonal blocks
conjugated by a random invertible matrix (unimodular integer matrices on
the rational path).
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from . import linalg as la
from .cohomology import z1_space
from .groups import FreeAbelianGroup, FreeGroup, HeisenbergGroup, ProductGroup, cyclic_group, permutation_group
from .reps import Representation, certified_norm, markov_operator
from .groups import FiniteSupportMeasure

TRIPLES = [(3, 4, 5), (5, 12, 13), (8, 15, 17), (7, 24, 25), (20, 21, 29)]

# permutation groups of order <= 24 with generator names
FINITE_CATALOG = {
    "S3": ([[1, 0, 2], [1, 2, 0]], ["s", "t"]),
    "D4": ([[1, 2, 3, 0], [0, 3, 2, 1]], ["r", "f"]),
    "D5": ([[1, 2, 3, 4, 0], [0, 4, 3, 2, 1]], ["r", "f"]),
    "D6": ([[1, 2, 3, 4, 5, 0], [0, 5, 4, 3, 2, 1]], ["r", "f"]),
    "A4": ([[1, 2, 0, 3], [1, 0, 3, 2]], ["u", "v"]),
    "S4": ([[1, 0, 2, 3], [1, 2, 3, 0]], ["s", "t"]),
    "C2xC4": ([[1, 0, 2, 3, 4, 5], [0, 1, 3, 4, 5, 2]], ["p", "q"]),
    "C3xC3": ([[1, 2, 0, 3, 4, 5], [0, 1, 2, 4, 5, 3]], ["p", "q"]),
    "C2xC2": ([[1, 0, 2, 3], [0, 1, 3, 2]], ["p", "q"]),
    "C2^3": ([[1, 0, 2, 3, 4, 5], [0, 1, 3, 2, 4, 5], [0, 1, 2, 3, 5, 4]], ["p", "q", "w"]),
}
ABELIAN = {"C2xC4", "C3xC3", "C2xC2", "C2^3"}


class Builder:
    """Accumulates declarations and tasks of one problem document."""

    def __init__(self):
        self.doc = {"groups": {}, "subgroups": {}, "measures": {}, "representations": {}, "cocycles": {},
                    "algebra_actions": {}, "tasks": []}
        self._objs = {}

    def group(self, name, decl, obj):
        if name not in self.doc["groups"]:
            self.doc["groups"][name] = decl
            self._objs[name] = obj
        return name

    def obj(self, name):
        return self._objs[name]

    def rep(self, name, group, mats, exact):
        self.doc["representations"][name] = {
            "group": group, "scalars": "rational" if exact else "float",
            "images": [la.to_jsonable(m) for m in mats]}
        return name

    def measure(self, name, group, atoms):
        self.doc["measures"][name] = {"group": group, "atoms": {w: _weight(p) for w, p in atoms.items()}}
        return name

    def subgroup(self, name, group, gens):
        self.doc["subgroups"][name] = {"group": group, "generators": list(gens)}
        return name

    def cocycle(self, name, rep, vals):
        self.doc["cocycles"][name] = {"rep": rep, "values": [la.to_jsonable(v) for v in vals]}
        return name

    def task(self, tid, ttype, **refs):
        self.doc["tasks"].append({"id": tid, "type": ttype, **refs})


def _weight(p):
    return str(p) if isinstance(p, Fraction) else p


# -- random matrices -----------------------------------------------------------

def _rational_rotation(rng):
    a, b, c = TRIPLES[rng.integers(len(TRIPLES))]
    s = Fraction(int(rng.choice([-1, 1])) * b, c)
    co = Fraction(a, c)
    return np.array([[co, -s], [s, co]], dtype=object)


def _rotation(rng, exact):
    if exact:
        return _rational_rotation(rng)
    t = float(rng.uniform(0.3, 2 * np.pi - 0.3))
    return np.array([[np.cos(t), -np.sin(t)], [np.sin(t), np.cos(t)]])


def _reflection(rng, exact):
    R = _rotation(rng, exact)
    F = np.array([[1, 0], [0, -1]], dtype=object if exact else float)
    if exact:
        F = la.coerce(F, True)
    return R @ F


def _block_diag(blocks, exact):
    d = sum(b.shape[0] for b in blocks)
    out = la.zeros((d, d), exact)
    i = 0
    for b in blocks:
        k = b.shape[0]
        out[i : i + k, i : i + k] = la.coerce(b, exact)
        i += k
    return out


def _conjugator(rng, d, exact):
    if d == 0:
        return la.eye(0, exact), la.eye(0, exact)
    if exact:
        S = la.eye(d, True)
        for _ in range(d + 1):
            i, j = rng.choice(d, 2, replace=False) if d > 1 else (0, 0)
            if i == j:
                continue
            E = la.eye(d, True)
            E[i, j] = Fraction(int(rng.integers(-1, 2)))
            S = S @ E
        return S, la.inverse(S)
    S = np.eye(d) + 0.25 * rng.standard_normal((d, d))
    return S, np.linalg.inv(S)


def _conjugate(mats, rng, exact):
    d = mats[0].shape[0]
    S, Si = _conjugator(rng, d, exact)
    return [S @ la.coerce(m, exact) @ Si for m in mats]


def _scalar(v, exact):
    return np.array([[Fraction(v) if exact else float(v)]], dtype=object if exact else float)


def _sign(rng):
    return int(rng.choice([-1, 1]))


# -- representations of the infinite families -----------------------------------

def rep_free(rng, k, d, exact, fixed_point_free=False):
    """k independent orthogonal matrices built from 1- and 2-dimensional blocks."""
    per = [[] for _ in range(k)]
    left = d
    while left:
        size = 2 if left >= 2 and rng.random() < 0.6 else 1
        for i in range(k):
            if size == 1:
                v = -1 if fixed_point_free and i == 0 else _sign(rng)
                per[i].append(_scalar(v, exact))
            else:
                kind = rng.integers(3)
                if fixed_point_free and i == 0:
                    kind = 0
                per[i].append(_rotation(rng, exact) if kind == 0 else _reflection(rng, exact) if kind == 1
                              else la.coerce(np.array([[0, 1], [1, 0]], dtype=object), exact))
        left -= size
    return [_block_diag(b, exact) for b in per]


def rep_abelian(rng, k, d, exact, fixed_point_free=False):
    """k commuting orthogonal matrices: simultaneous 1-dim signs or 2-dim rotations."""
    per = [[] for _ in range(k)]
    left = d
    while left:
        size = 2 if left >= 2 and rng.random() < 0.6 else 1
        for i in range(k):
            if size == 1:
                v = -1 if fixed_point_free and i == 0 else _sign(rng)
                per[i].append(_scalar(v, exact))
            else:
                R = _rotation(rng, exact) if rng.random() < 0.8 or (fixed_point_free and i == 0) \
                    else la.eye(2, exact) * _sign(rng)
                per[i].append(R)
        left -= size
    return [_block_diag(b, exact) for b in per]


def rep_heisenberg(rng, d, exact):
    """Sums of characters, commuting rotation pairs (z trivial) and the dihedral block (z = -1)."""
    xs, ys, zs = [], [], []
    left = d
    while left:
        r = rng.random()
        if left >= 2 and r < 0.45:
            e1, e2 = _sign(rng), _sign(rng)
            xs.append(la.coerce(np.array([[0, 1], [1, 0]], dtype=object), exact) * e1)
            ys.append(la.coerce(np.array([[1, 0], [0, -1]], dtype=object), exact) * e2)
            zs.append(la.eye(2, exact) * -1)
            left -= 2
        elif left >= 2 and r < 0.7:
            xs.append(_rotation(rng, exact))
            ys.append(_rotation(rng, exact))
            zs.append(la.eye(2, exact))
            left -= 2
        else:
            xs.append(_scalar(_sign(rng), exact))
            ys.append(_scalar(_sign(rng), exact))
            zs.append(_scalar(1, exact))
            left -= 1
    return [_block_diag(b, exact) for b in (xs, ys, zs)]


def _perm_matrix(p, exact):
    n = len(p)
    M = la.zeros((n, n), exact)
    for i, j in enumerate(p):
        M[j, i] = Fraction(1) if exact else 1.0
    return M


def _parity(p) -> int:
    seen, sign = set(), 1
    for i in range(len(p)):
        if i in seen:
            continue
        j, length = i, 0
        while j not in seen:
            seen.add(j)
            j = p[j]
            length += 1
        sign *= -1 if length % 2 == 0 else 1
    return sign


def rep_finite(rng, perms, exact, max_dim=6):
    """Direct sum of natural, sign and trivial pieces of a permutation group."""
    pieces = []
    if len(perms[0]) <= max_dim:
        pieces.append([_perm_matrix(p, exact) for p in perms])
    pieces.append([_scalar(_parity(p), exact) for p in perms])
    pieces.append([_scalar(1, exact) for p in perms])
    chosen, dim = [], 0
    for _ in range(int(rng.integers(1, 4))):
        pc = pieces[int(rng.integers(len(pieces)))]
        if dim + pc[0].shape[0] <= max_dim:
            chosen.append(pc)
            dim += pc[0].shape[0]
    if not chosen:
        chosen = [pieces[-2]]
    mats = [_block_diag([c[i] for c in chosen], exact) for i in range(len(perms))]
    return _conjugate(mats, rng, exact)


def rep_cyclic(rng, n, exact):
    pieces = [[_scalar(1, exact)]]
    if n % 2 == 0:
        pieces.append([_scalar(-1, exact)])
    if n <= 6:
        cyc = list(range(1, n)) + [0]
        pieces.append([_perm_matrix(cyc, exact)])
    if n == 4:
        pieces.append([la.coerce(np.array([[0, -1], [1, 0]], dtype=object), exact)])
    if not exact:
        k = int(rng.integers(1, n))
        t = 2 * np.pi * k / n
        pieces.append([np.array([[np.cos(t), -np.sin(t)], [np.sin(t), np.cos(t)]])])
    chosen, dim = [], 0
    for _ in range(int(rng.integers(1, 3))):
        pc = pieces[int(rng.integers(len(pieces)))]
        if dim + pc[0].shape[0] <= 6:
            chosen.append(pc)
            dim += pc[0].shape[0]
    mats = [_block_diag([c[0] for c in chosen], exact)]
    return _conjugate(mats, rng, exact)


# -- measures -----------------------------------------------------------------

def _rational_weights(rng, k):
    raw = [int(x) for x in rng.integers(1, 6, size=k)]
    tot = sum(raw)
    return [Fraction(r, tot) for r in raw]


def random_measure(rng, names, max_atoms=4):
    letters = list(names) + [f"{n}^-1" for n in names]
    pool = ["e"] + letters + [f"{a} {b}" for a in letters for b in letters]
    k = int(rng.integers(1, max_atoms + 1))
    words = list(dict.fromkeys(str(pool[i]) for i in rng.choice(len(pool), k, replace=False)))
    return dict(zip(words, _rational_weights(rng, len(words))))


# -- the document ---------------------------------------------------------------

def _infinite_groups(B: Builder):
    B.group("Z", {"family": "free_abelian", "generators": ["a"]}, FreeAbelianGroup(1, ["a"]))
    B.group("Z2", {"family": "free_abelian", "generators": ["a", "b"]}, FreeAbelianGroup(2, ["a", "b"]))
    B.group("F2", {"family": "free", "generators": ["a", "b"]}, FreeGroup(2, ["a", "b"]))
    B.group("H3", {"family": "heisenberg3"}, HeisenbergGroup())


def _finite_group(B: Builder, name):
    perms, names = FINITE_CATALOG[name]
    return B.group(name, {"family": "permutation", "permutations": perms, "generators": names},
                   permutation_group(perms, names))


def _cyclic(B: Builder, n):
    return B.group(f"C{n}", {"family": "cyclic", "order": n}, cyclic_group(n))


def _instance_rep(B, rng, gname, exact):
    G = B.obj(gname)
    d = int(rng.integers(1, 7))
    if gname == "Z":
        mats = rep_free(rng, 1, d, exact)
    elif gname == "Z2":
        mats = rep_abelian(rng, 2, d, exact)
    elif gname == "F2":
        mats = rep_free(rng, 2, d, exact)
    elif gname == "H3":
        mats = rep_heisenberg(rng, d, exact)
    elif gname in FINITE_CATALOG:
        return rep_finite(rng, FINITE_CATALOG[gname][0], exact)
    else:
        return rep_cyclic(rng, G.order, exact)
    return _conjugate(mats, rng, exact)


def projection_instances(B: Builder, rng, count=200):
    """Random certified representations with random finitely supported measures."""
    _infinite_groups(B)
    finite = [_finite_group(B, n) for n in FINITE_CATALOG] + [_cyclic(B, n) for n in (2, 3, 4, 5, 6, 8, 12)]
    kinds = ["Z", "Z2", "F2", "H3", "finite"]
    for i in range(count):
        kind = kinds[i % len(kinds)]
        gname = finite[int(rng.integers(len(finite)))] if kind == "finite" else kind
        exact = bool(i % 2 == 0)
        rname = B.rep(f"proj{i:03d}", gname, _instance_rep(B, rng, gname, exact), exact)
        mname = B.measure(f"proj{i:03d}_mu", gname, random_measure(rng, B.obj(gname).names))
        B.task(f"proj-{i:03d}", "cesaro", rep=rname, measure=mname)
        B.task(f"wus-{i:03d}", "stationary-decomposition", rep=rname, measure=mname)


def harmonic_instances(B: Builder, rng, count=24):
    """Representations with certified ||rho_mu|| < 1 (no common fixed vector, identity in the support)."""
    made = 0
    attempt = 0
    while made < count:
        attempt += 1
        gname = ["F2", "Z", "Z2"][attempt % 3]
        G = B.obj(gname)
        exact = bool(attempt % 2)
        d = int(rng.integers(1, 5))
        mats = rep_free(rng, G.ngens, d, exact, True) if gname != "Z2" else rep_abelian(rng, 2, d, exact, True)
        mats = _conjugate(mats, rng, exact)
        atoms = {"e": Fraction(1)}
        atoms = dict(zip(["e"] + list(G.names), _rational_weights(rng, 1 + G.ngens)))
        rho = Representation(G, mats, exact)
        mu = FiniteSupportMeasure(G, atoms)
        if certified_norm(rho, markov_operator(rho, mu)) >= 1 - 1e-9:
            continue
        rname = B.rep(f"harm{made:02d}", gname, mats, exact)
        mname = B.measure(f"harm{made:02d}_mu", gname, atoms)
        B.task(f"harm-{made:02d}", "harmonic", rep=rname, measure=mname)
        made += 1
    B.rep("harm_sign", "F2", [_scalar(-1, True), _scalar(1, True)], True)
    B.measure("harm_sign_mu", "F2", {"a": Fraction(1, 2), "b": Fraction(1, 2)})
    B.task("harm-sign", "harmonic", rep="harm_sign", measure="harm_sign_mu")


def _random_cocycle(rng, rho):
    Z = z1_space(rho)
    exact = rho.exact
    if Z.shape[1] == 0:
        return None
    if exact:
        c = np.array([Fraction(int(x)) for x in rng.integers(-3, 4, size=Z.shape[1])], dtype=object)
    else:
        c = rng.standard_normal(Z.shape[1])
    x = Z @ c
    d = rho.dim
    return [x[i * d : (i + 1) * d] for i in range(rho.group.ngens)]


def _inverse_word(word: str) -> str:
    out = []
    for tok in reversed(word.split()):
        base, _, exp = tok.partition("^")
        e = -int(exp) if exp else -1
        out.append(base if e == 1 else f"{base}^{e}")
    return " ".join(out)


def _central_measure(rng, word):
    w = _rational_weights(rng, 3)
    return {word: w[0], _inverse_word(word): w[1], "e": w[2]}


def compression_instances(B: Builder, rng, count=54):
    """(G, N, C, mu, rho, b) with C inside the centralizer of N."""
    layouts = [
        ("Z2", "a", "b"), ("Z2", "a", "a"), ("Z2", "a b", "b"),
        ("H3", "z", "z"), ("H3", "x", "z"), ("H3", "x z", "z"),
    ]
    made = 0
    i = 0
    while made < count:
        gname, n_gen, c_gen = layouts[i % len(layouts)]
        exact = bool((i // len(layouts)) % 2 == 0)
        i += 1
        G = B.obj(gname)
        mats = _instance_rep(B, rng, gname, exact)
        rho = Representation(G, mats, exact)
        vals = _random_cocycle(rng, rho)
        if vals is None:
            continue
        tag = f"comp{made:02d}"
        rname = B.rep(tag, gname, mats, exact)
        B.cocycle(f"{tag}_b", rname, vals)
        B.subgroup(f"{tag}_N", gname, [n_gen])
        B.subgroup(f"{tag}_C", gname, [c_gen])
        B.measure(f"{tag}_mu", gname, _central_measure(rng, c_gen))
        B.task(f"comp-{made:02d}", "compress", N=f"{tag}_N", C=f"{tag}_C", measure=f"{tag}_mu",
               cocycle=f"{tag}_b")
        made += 1
    # finite groups: abelian with N, C generated by different factors
    for j, name in enumerate(["C2xC4", "C3xC3", "C2xC2", "C2^3"]):
        gname = _finite_group(B, name)
        G = B.obj(gname)
        exact = j % 2 == 0
        mats = rep_finite(rng, FINITE_CATALOG[name][0], exact)
        rho = Representation(G, mats, exact)
        vals = _random_cocycle(rng, rho)
        tag = f"compf{j}"
        rname = B.rep(tag, gname, mats, exact)
        if vals is None:
            vals = [rho.zeros() for _ in range(G.ngens)]
        B.cocycle(f"{tag}_b", rname, vals)
        B.subgroup(f"{tag}_N", gname, [G.names[0]])
        B.subgroup(f"{tag}_C", gname, [G.names[1]])
        B.measure(f"{tag}_mu", gname, _central_measure(rng, G.names[1]))
        B.task(f"comp-f{j}", "compress", N=f"{tag}_N", C=f"{tag}_C", measure=f"{tag}_mu", cocycle=f"{tag}_b")


def degree_two_instances(B: Builder, rng):
    """Degree-two compression on small finite groups through the bar complex."""
    specs = [("C2", None), ("C3", None), ("C4", None), ("C2xC2", "C2xC2"), ("S3", "S3"),
             ("C2", None), ("C3", None), ("C4", None), ("C2xC2", "C2xC2"), ("C6", None), ("D4", "D4")]
    for j, (gname, cat) in enumerate(specs):
        if cat:
            _finite_group(B, cat)
        else:
            _cyclic(B, int(gname[1:]))
        G = B.obj(gname)
        exact = j % 2 == 0
        if cat:
            mats = rep_finite(rng, FINITE_CATALOG[cat][0], exact, max_dim=2 if G.order > 6 else 3)
        else:
            mats = rep_cyclic(rng, G.order, exact)
            if mats[0].shape[0] > 3:
                mats = [_scalar(-1 if G.order % 2 == 0 else 1, exact)]
        tag = f"deg2_{j}"
        rname = B.rep(tag, gname, mats, exact)
        if gname == "D4":
            n_gens, c_gens = ["r", "f"], ["r^2"]
        elif gname in ("C2xC2",):
            n_gens, c_gens = ["p"], ["q"]
        elif gname == "S3":
            n_gens, c_gens = ["t"], ["t"]
        else:
            n_gens, c_gens = [G.names[0]], [G.names[0]]
        B.subgroup(f"{tag}_N", gname, n_gens)
        B.subgroup(f"{tag}_C", gname, c_gens)
        B.measure(f"{tag}_mu", gname, _central_measure(rng, c_gens[0]))
        B.task(f"comp2-{j:02d}", "compress", N=f"{tag}_N", C=f"{tag}_C", measure=f"{tag}_mu", rep=rname,
               degree=2)


def finite_vanishing_instances(B: Builder, rng):
    """Every finite-group representation of the corpus: h1, bar-complex h1 and averaging primitives."""
    reps = [(n, r) for n, r in B.doc["representations"].items() if r["group"] in B._objs
            and B.obj(r["group"]).is_finite and not isinstance(B.obj(r["group"]), ProductGroup)]
    for k, (rname, decl) in enumerate(sorted(reps)):
        G = B.obj(decl["group"])
        exact = decl["scalars"] == "rational"
        from .problem import build_representation
        rho = build_representation(G, decl["images"], exact)
        B.task(f"fin-h1-{k:03d}", "h1", rep=rname, witnesses=False)
        if G.order ** 3 * rho.dim <= 2 * 10**5:
            B.task(f"fin-hn-{k:03d}", "hn", rep=rname, degree=1, witnesses=False)
        vals = _random_cocycle(rng, rho)
        if vals is None:
            continue
        B.cocycle(f"fin{k:03d}_b", rname, vals)
        B.task(f"fin-mem-{k:03d}", "membership", cocycle=f"fin{k:03d}_b")


def product_instances(B: Builder, rng, count=12):
    """G1 x G2 with G1 acting without fixed vectors and G2 by commuting signs."""
    Za = B.group("Za", {"family": "free_abelian", "generators": ["a"]}, FreeAbelianGroup(1, ["a"]))
    Zb = B.group("Zb", {"family": "free_abelian", "generators": ["b"]}, FreeAbelianGroup(1, ["b"]))
    B.group("ZxZ", {"family": "product", "factors": [Za, Zb]}, ProductGroup(B.obj(Za), B.obj(Zb)))
    rot = np.array([[-0.5, -np.sqrt(3) / 2], [np.sqrt(3) / 2, -0.5]])
    B.rep("prod_rot", "ZxZ", [rot, np.eye(2)], False)
    B.measure("prod_rot_mu1", Za, {"a": Fraction(1, 2), "a^-1": Fraction(1, 2)})
    B.measure("prod_rot_mu2", Zb, {"b": Fraction(1)})
    B.task("prod-rot-iso", "product-iso", rep="prod_rot", mu1="prod_rot_mu1", mu2="prod_rot_mu2")
    B.task("prod-rot-embed", "product-embed", rep="prod_rot", mu1="prod_rot_mu1", mu2="prod_rot_mu2")

    Fa = B.group("F2p", {"family": "free", "generators": ["a", "b"]}, FreeGroup(2, ["a", "b"]))
    Fc = B.group("F2q", {"family": "free", "generators": ["c", "d"]}, FreeGroup(2, ["c", "d"]))
    C2 = B.group("C2f", {"family": "cyclic", "order": 2, "generators": ["f"]}, cyclic_group(2, "f"))
    firsts = [Za, Fa]
    seconds = [Zb, C2, Fc]
    for k in range(count):
        g1, g2 = firsts[k % 2], seconds[(k // 2) % 3]
        pname = B.group(f"{g1}x{g2}", {"family": "product", "factors": [g1, g2]},
                        ProductGroup(B.obj(g1), B.obj(g2)))
        G1, G2 = B.obj(g1), B.obj(g2)
        exact = k % 3 != 2
        blocks1 = [[] for _ in range(G1.ngens)]
        blocks2 = [[] for _ in range(G2.ngens)]
        for _ in range(int(rng.integers(1, 3))):
            size = int(rng.integers(1, 3))
            m1 = rep_abelian(rng, 1, size, exact, True) if G1.ngens == 1 else rep_free(rng, 2, size, exact, True)
            for i in range(G1.ngens):
                blocks1[i].append(m1[i])
            for i in range(G2.ngens):
                blocks2[i].append(la.eye(size, exact) * _sign(rng))
        mats = _conjugate([_block_diag(b, exact) for b in blocks1 + blocks2], rng, exact)
        rname = B.rep(f"prod{k:02d}", pname, mats, exact)
        mu1 = B.measure(f"prod{k:02d}_mu1", g1, dict(zip(["e"] + list(G1.names),
                                                         _rational_weights(rng, 1 + G1.ngens))))
        if G2.is_finite:
            atoms2 = {"e": Fraction(1, 2), G2.names[0]: Fraction(1, 2)}
        else:
            letters = list(G2.names) + [f"{n}^-1" for n in G2.names]
            atoms2 = dict(zip(letters, _rational_weights(rng, len(letters))))
        mu2 = B.measure(f"prod{k:02d}_mu2", g2, atoms2)
        B.task(f"prod-{k:02d}-iso", "product-iso", rep=rname, mu1=mu1, mu2=mu2)
        B.task(f"prod-{k:02d}-embed", "product-embed", rep=rname, mu1=mu1, mu2=mu2)


def nilpotent_instances(B: Builder, rng, count=16):
    heis = [("nil_fixed", [[[1, 0, 0], [0, 0, 1], [0, 1, 0]], [[1, 0, 0], [0, 1, 0], [0, 0, -1]],
                           [[1, 0, 0], [0, -1, 0], [0, 0, -1]]])]
    for name, mats in heis:
        B.doc["representations"][name] = {"group": "H3", "scalars": "rational", "images": mats}
        B.task(f"nil-{name}", "nilpotent-reduce", rep=name, witnesses=False)
    for k in range(count):
        exact = k % 2 == 0
        mats = _conjugate(rep_heisenberg(rng, int(rng.integers(1, 7)), exact), rng, exact)
        rname = B.rep(f"nil{k:02d}", "H3", mats, exact)
        B.task(f"nil-{k:02d}", "nilpotent-reduce", rep=rname, witnesses=False)


def induction_instances(B: Builder):
    B.subgroup("ind_gamma", "F2", ["a^2", "b", "a b a^-1"])
    B.task("ind-f2-check", "induction-check", subgroup="ind_gamma")
    B.task("ind-f2-transversal", "transversal", subgroup="ind_gamma")
    B.subgroup("ind_gamma3", "F2", ["a^3", "b", "a b a^-1", "a^2 b a^-2"])
    B.task("ind-f2-3-check", "induction-check", subgroup="ind_gamma3", base_images=[[[-1]], [[1]], [["-1"]], [[1]]])
    B.subgroup("ind_2z", "Z", ["a^2"])
    B.task("ind-2z-rep", "induce-rep", subgroup="ind_2z", base_images=[[[-1]]])
    B.task("ind-2z-check", "induction-check", subgroup="ind_2z", base_images=[[[-1]]])
    B.task("ind-2z-cocycle", "induce-cocycle", subgroup="ind_2z", base_values=[[1]])
    B.task("ind-stages-z", "induction-stages", subgroup="ind_2z", inner_generators=["a^2"],
           base_images=[[["-1"]]])
    B.task("ind-stages-z-trivial", "induction-stages", subgroup="ind_2z", inner_generators=["a^2"], base_dim=2)
    B.subgroup("ind_s3", "S3", ["s"])
    B.task("ind-s3-check", "induction-check", subgroup="ind_s3", base_images=[[[-1]]])


def liouville_instances(B: Builder, rng, count=16):
    abelian = [_finite_group(B, n) for n in sorted(ABELIAN)] + [_cyclic(B, n) for n in (2, 3, 4, 5, 6, 8, 12)]
    for k in range(count):
        gname = abelian[k % len(abelian)]
        G = B.obj(gname)
        m = B.measure(f"liou{k:02d}_mu", gname, random_measure(rng, G.names, 3))
        B.task(f"liou-harm-{k:02d}", "harmonic-space", group=gname, measure=m, witnesses=False)
        B.task(f"liou-check-{k:02d}", "liouville", group=gname, measure=m)
    B.group("C2f", {"family": "cyclic", "order": 2, "generators": ["f"]}, cyclic_group(2, "f"))
    B.doc["algebra_actions"]["flip"] = {"group": "C2f", "blocks": [1, 1], "perms": [[1, 0]],
                                        "unitaries": [[[[1]], [[1]]]]}
    B.measure("flip_mu", "C2f", {"e": Fraction(1, 2), "f": Fraction(1, 2)})
    B.task("liou-flip", "stationary-states", action="flip", measure="flip_mu")
    B.doc["algebra_actions"]["swap2"] = {"group": "C2f", "blocks": [2],
                                         "perms": [[0]], "unitaries": [[[[0, 1], [1, 0]]]]}
    B.task("liou-swap2", "stationary-states", action="swap2", measure="flip_mu")


def full_corpus(seed: int = 20240601) -> dict:
    """The complete seeded corpus as a problem document."""
    rng = np.random.default_rng(seed)
    B = Builder()
    projection_instances(B, rng)
    harmonic_instances(B, rng)
    compression_instances(B, rng)
    degree_two_instances(B, rng)
    product_instances(B, rng)
    nilpotent_instances(B, rng)
    induction_instances(B)
    liouville_instances(B, rng)
    finite_vanishing_instances(B, rng)
    B.doc["options"] = {"witnesses": False}
    return B.doc


def main(argv=None):
    import sys
    from .cli import main as cli_main
    return cli_main(["corpus", *(sys.argv[1:] if argv is None else argv)])


if __name__ == "__main__":
    raise SystemExit(main())
