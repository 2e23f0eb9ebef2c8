"""Cocycles, coboundaries and cohomology.

Degree one uses inhomogeneous cocycles beta(g) = b(e, g), stored by their
values on generators and constrained by the relators (Fox derivatives).
Finite groups additionally get the homogeneous bar complex: C^m(G, V)^G is
the space of equivariant m-argument functions, coordinatized by the values
F(t) = f(e, t) on tuples t in G^(m-1).  Z^n = ker d^(n+1) and B^n = im d^n,
both inside C^(n+1).

Sign convention: the homogeneous value b(h, e) equals -beta(h).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iproduct

import numpy as np

from . import linalg as la
from .errors import BudgetExceeded, NormPreconditionFailed, UnsupportedFamily
from .groups import FiniteSupportMeasure, FiniteTableGroup
from .reps import Representation, certified_norm, fixed_space, laplacian, markov_operator
from .words import Word

CONVENTION = "beta(g)=b(e,g); b(h,e)=-beta(h)"
MEMBERSHIP_REJECT = 1e-6
MEMBERSHIP_ACCEPT = 1e-9


# -- inhomogeneous cocycles -------------------------------------------------

class InhomCocycle:
    """Values beta(s) on the generators of ``rep.group``."""

    def __init__(self, rep: Representation, values):
        self.rep = rep
        vals = [la.coerce(np.asarray(v, dtype=object) if not isinstance(v, np.ndarray) else v, rep.exact)
                for v in values]
        if len(vals) != rep.group.ngens:
            raise ValueError("one value per generator required")
        if any(v.shape != (rep.dim,) for v in vals):
            raise ValueError(f"cocycle values must have length {rep.dim}")
        self.values = vals

    @classmethod
    def from_vector(cls, rep, x):
        d = rep.dim
        return cls(rep, [x[i * d : (i + 1) * d] for i in range(rep.group.ngens)])

    @classmethod
    def zero(cls, rep):
        return cls(rep, [rep.zeros() for _ in range(rep.group.ngens)])

    @classmethod
    def coboundary(cls, rep, v):
        v = la.coerce(np.asarray(v, dtype=object) if not isinstance(v, np.ndarray) else v, rep.exact)
        return cls(rep, [v - m @ v for m in rep.images])

    def vector(self) -> np.ndarray:
        if not self.values:
            return self.rep.zeros(0)
        return np.concatenate(self.values)

    def __call__(self, w: Word) -> np.ndarray:
        return expand_word_cocycle(self, w)

    def describe(self) -> dict:
        return {n: la.to_jsonable(v) for n, v in zip(self.rep.group.names, self.values)}


def expand_word_cocycle(b: InhomCocycle, w: Word) -> np.ndarray:
    """beta(w) from beta(uv) = beta(u) + rho_u beta(v), left to right."""
    rho = b.rep
    if isinstance(w, str):
        w = rho.group.parse(w)
    acc = rho.zeros()
    M = rho.eye()
    for g, e in w.letters:
        if e > 0:
            for _ in range(e):
                acc = acc + M @ b.values[g]
                M = M @ rho.images[g]
        else:
            for _ in range(-e):
                M = M @ rho.inverses[g]
                acc = acc - M @ b.values[g]
    return acc


def fox_jacobian(rho: Representation, w: Word) -> np.ndarray:
    """Matrix J with beta(w) = J @ (stacked generator values)."""
    d, k = rho.dim, rho.group.ngens
    J = la.zeros((d, k * d), rho.exact)
    M = rho.eye()
    for g, e in w.letters:
        sl = slice(g * d, (g + 1) * d)
        if e > 0:
            for _ in range(e):
                J[:, sl] = J[:, sl] + M
                M = M @ rho.images[g]
        else:
            for _ in range(-e):
                M = M @ rho.inverses[g]
                J[:, sl] = J[:, sl] - M
    return J


def relator_system(rho: Representation) -> np.ndarray:
    d, k = rho.dim, rho.group.ngens
    rels = rho.group.relators()
    if not rels:
        return la.zeros((0, k * d), rho.exact)
    return np.vstack([fox_jacobian(rho, r) for r in rels])


def coboundary_map(rho: Representation) -> np.ndarray:
    """v -> (v - rho_s v)_s as a (k d) x d matrix."""
    I = rho.eye()
    if rho.group.ngens == 0:
        return la.zeros((0, rho.dim), rho.exact)
    return np.vstack([I - m for m in rho.images])


def is_cocycle(b: InhomCocycle, tol: float = 1e-9) -> tuple[bool, float]:
    rho = b.rep
    worst = 0.0
    for r in rho.group.relators():
        worst = max(worst, la.max_abs(expand_word_cocycle(b, r)))
    ok = worst == 0 if rho.exact else worst <= tol * (1 + la.max_abs(b.vector()))
    return ok, worst


@dataclass
class CohomologySummary:
    dim_Z: int
    dim_B: int
    dim_H: int
    Z: np.ndarray
    B: np.ndarray
    H: np.ndarray
    exact: bool
    tol: float
    degree: int = 1

    def describe(self, witnesses: bool = True) -> dict:
        out = {"degree": self.degree, "dim_Z": self.dim_Z, "dim_B": self.dim_B, "dim_H": self.dim_H,
               "scalars": "rational" if self.exact else "float", "tol": self.tol, "convention": CONVENTION}
        if witnesses:
            out.update({"Z": la.to_jsonable(self.Z.T), "B": la.to_jsonable(self.B.T),
                        "H": la.to_jsonable(self.H.T)})
        return out


def _summary(Z, B, exact, degree=1) -> CohomologySummary:
    if Z.shape[1] and B.shape[1] and not la.in_span(Z, B, 1e-7):
        raise ArithmeticError("coboundaries are not contained in the cocycles")
    H = la.complement(Z, B)
    tol = 0.0 if exact else la.RANK_RTOL
    s = CohomologySummary(Z.shape[1], B.shape[1], H.shape[1], Z, B, H, exact, tol, degree)
    if s.dim_H != s.dim_Z - s.dim_B:
        raise ArithmeticError("dim H != dim Z - dim B")
    return s


def z1_space(rho: Representation) -> np.ndarray:
    """Basis (columns) of cocycles as stacked generator values."""
    return la.nullspace(relator_system(rho))


def b1_space(rho: Representation) -> np.ndarray:
    return la.column_space(coboundary_map(rho))


def h1(rho: Representation) -> CohomologySummary:
    return _summary(z1_space(rho), b1_space(rho), rho.exact)


def cocycle_basis(rho: Representation, cols: np.ndarray) -> list[InhomCocycle]:
    return [InhomCocycle.from_vector(rho, cols[:, j]) for j in range(cols.shape[1])]


@dataclass
class Membership:
    status: str
    primitive: np.ndarray | None
    residual: float

    @property
    def is_coboundary(self) -> bool:
        return self.status == "coboundary"

    def describe(self) -> dict:
        return {"status": self.status, "residual": self.residual,
                "primitive": None if self.primitive is None else la.to_jsonable(self.primitive)}


def coboundary_membership(b: InhomCocycle) -> Membership:
    """Solve beta(s) = v - rho_s v; the primitive returned is orthogonal to V^G."""
    rho = b.rep
    A = coboundary_map(rho)
    x = b.vector()
    if rho.dim == 0:
        return Membership("coboundary", rho.zeros(), 0.0)
    if rho.exact:
        v = la.solve(A, x)
        if v is None:
            return Membership("not-coboundary", None, float("inf"))
        F = fixed_space(rho)
        if F.shape[1]:
            c = la.solve(F.T @ F, F.T @ v)
            v = v - F @ c
        return Membership("coboundary", v, 0.0)
    Af = la.as_float(A)
    v = np.linalg.lstsq(Af, x, rcond=None)[0] if Af.size else np.zeros(rho.dim)
    res = float(np.linalg.norm(Af @ v - x))
    scale = 1 + float(np.linalg.norm(x))
    if res > MEMBERSHIP_REJECT * scale:
        return Membership("not-coboundary", None, res)
    if res > MEMBERSHIP_ACCEPT * scale:
        return Membership("ambiguous", v, res)
    return Membership("coboundary", v, res)


def averaging_primitive(b: InhomCocycle) -> np.ndarray:
    """For a finite group: v = |G|^-1 sum_g beta(g) satisfies beta = v - rho v."""
    G = b.rep.group
    if not isinstance(G, FiniteTableGroup):
        raise UnsupportedFamily("averaging needs a finite group")
    acc = b.rep.zeros()
    for g in range(G.order):
        acc = acc + expand_word_cocycle(b, G.word_of(g))
    return acc * Fraction(1, G.order) if b.rep.exact else acc / G.order


# -- harmonic decomposition --------------------------------------------------

@dataclass
class HarmonicDecomposition:
    P: np.ndarray
    Z: np.ndarray
    B: np.ndarray
    H_mu: np.ndarray
    markov_norm: float

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.Z.shape[1], self.B.shape[1], self.H_mu.shape[1]

    def describe(self) -> dict:
        z, b, h = self.dims
        return {"dim_Z": z, "dim_B": b, "dim_H_mu": h, "markov_norm": self.markov_norm,
                "H_mu": la.to_jsonable(self.H_mu.T), "convention": CONVENTION}


def mean_map(rho: Representation, mu: FiniteSupportMeasure) -> np.ndarray:
    """Matrix of beta -> sum_h mu(h) beta(h) on stacked generator values."""
    exact = rho.exact and mu.exact
    out = la.zeros((rho.dim, rho.dim * rho.group.ngens), exact)
    for w, p in mu.items():
        J = fox_jacobian(rho, w)
        out = out + (p * J if exact else float(p) * la.as_float(J))
    return out


def harmonic_projection_matrix(rho: Representation, mu: FiniteSupportMeasure) -> np.ndarray:
    """b -> coboundary of v_b with v_b = Delta^-1 sum_h mu(h) beta(h)."""
    try:
        Dinv = la.inverse(laplacian(rho, mu))
    except la.LinalgError as e:
        # reachable only when a norm gate was forced open
        raise NormPreconditionFailed("Delta_mu is singular, so the harmonic projection is undefined") from e
    Mean = mean_map(rho, mu)
    C = coboundary_map(rho)
    if not la.is_exact(Dinv) or not la.is_exact(Mean):
        C, Dinv, Mean = la.as_float(C), la.as_float(Dinv), la.as_float(Mean)
    return C @ Dinv @ Mean


def harmonic_decomposition(rho: Representation, mu: FiniteSupportMeasure, force: bool = False) -> HarmonicDecomposition:
    """Z^1 = B^1 + H^1_mu with H^1_mu the mu-mean-zero cocycles."""
    T = markov_operator(rho, mu)
    nrm = certified_norm(rho, T)
    if nrm >= 1 - 1e-12 and not force:
        raise NormPreconditionFailed(f"||rho_mu|| = {nrm:.6g} is not < 1")
    P = harmonic_projection_matrix(rho, mu)
    Z, B = z1_space(rho), b1_space(rho)
    exact = la.is_exact(P) and la.is_exact(Z)
    if not exact:
        Z, B = la.as_float(Z), la.as_float(B)
    Mean = mean_map(rho, mu)
    if not exact:
        Mean = la.as_float(Mean)
    # harmonic cocycles: cocycle coordinates c with Mean Z c = 0
    if Z.shape[1]:
        Hc = la.nullspace(Mean @ Z)
        H = la.column_space(Z @ Hc) if Hc.shape[1] else la.zeros((Z.shape[0], 0), exact)
    else:
        H = la.zeros((Z.shape[0], 0), exact)
    tol = 0.0 if exact else 1e-8
    if B.shape[1] and not la.is_zero(P @ B - B, tol):
        raise ArithmeticError("projection does not fix coboundaries")
    if Z.shape[1] and not la.is_zero(P @ (P @ Z) - P @ Z, tol):
        raise ArithmeticError("projection is not idempotent on cocycles")
    if B.shape[1] + H.shape[1] != Z.shape[1]:
        raise ArithmeticError("dim Z != dim B + dim H_mu")
    if B.shape[1] and H.shape[1] and la.rank(la.hstack([B, H], Z.shape[0], exact)) != Z.shape[1]:
        raise ArithmeticError("B and H_mu are not complementary")
    return HarmonicDecomposition(P, Z, B, H, nrm)


# -- bar complex --------------------------------------------------------------

BAR_BUDGET = 2 * 10**6


class BarComplex:
    """Equivariant bar complex of a finite group with coefficients in rho.

    ``C^m`` has coordinates indexed by tuples t in G^(m-1) (row-major over
    element indices) times the d coordinates of V.
    """

    def __init__(self, rho: Representation, budget: int = BAR_BUDGET):
        G = rho.group
        if not isinstance(G, FiniteTableGroup):
            raise UnsupportedFamily("bar complex needs a finite table group")
        self.rho, self.G, self.budget = rho, G, budget
        self.n = G.order
        self.d = rho.dim
        self._mats = [rho.of_element(g) for g in range(self.n)]
        self._cache = {}

    def dim(self, m: int) -> int:
        return self.n ** (m - 1) * self.d if m >= 1 else 0

    def _index(self, t) -> int:
        k = 0
        for x in t:
            k = k * self.n + x
        return k

    def differential(self, m: int):
        """Sparse d^m : C^m -> C^(m+1) as a dict {(row, col): scalar-block}."""
        if m < 1:
            raise ValueError("differentials start at d^1")
        if self.n ** (m + 1) * self.d > self.budget:
            raise BudgetExceeded(f"|G|^{m + 1} * d = {self.n ** (m + 1) * self.d} exceeds budget {self.budget}")
        if m in self._cache:
            return self._cache[m]
        G, n = self.G, self.n
        T, inv = G.table, G.inv
        exact = self.rho.exact
        rows, cols, blocks = [], [], []
        one = Fraction(1) if exact else 1.0
        for h in iproduct(range(n), repeat=m):
            r = self._index(h)
            # h = (h_2, ..., h_{m+1}); the full tuple is (e, h_2, ..., h_{m+1})
            h2 = h[0]
            rest = tuple(int(T[inv[h2], x]) for x in h[1:])
            rows.append(r)
            cols.append(self._index(rest))
            blocks.append(self._mats[h2])
            for i in range(2, m + 2):
                t = h[: i - 2] + h[i - 1 :]
                sign = one if i % 2 == 1 else -one
                rows.append(r)
                cols.append(self._index(t))
                blocks.append(sign)
        self._cache[m] = (rows, cols, blocks)
        return self._cache[m]

    def dense(self, m: int) -> np.ndarray:
        rows, cols, blocks = self.differential(m)
        d = self.d
        exact = self.rho.exact
        out = la.zeros((self.dim(m + 1), self.dim(m)), exact)
        I = la.eye(d, exact)
        for r, c, B in zip(rows, cols, blocks):
            blk = B if isinstance(B, np.ndarray) else B * I
            out[r * d : (r + 1) * d, c * d : (c + 1) * d] += blk
        return out

    def _dm(self, m: int):
        from sympy import QQ
        from sympy.polys.matrices import DomainMatrix
        rows, cols, blocks = self.differential(m)
        d = self.d
        acc: dict[int, dict[int, object]] = {}
        for r, c, B in zip(rows, cols, blocks):
            for i in range(d):
                row = acc.setdefault(r * d + i, {})
                for j in range(d):
                    v = B[i, j] if isinstance(B, np.ndarray) else (B if i == j else 0)
                    if v != 0:
                        row[c * d + j] = row.get(c * d + j, 0) + v
        sdm = {}
        for i, row in acc.items():
            clean = {j: QQ(v.numerator, v.denominator) for j, v in row.items() if v != 0}
            if clean:
                sdm[i] = clean
        return DomainMatrix(sdm, (self.dim(m + 1), self.dim(m)), QQ)

    def _sparse(self, m: int):
        import scipy.sparse as sp
        rows, cols, blocks = self.differential(m)
        d = self.d
        R, C, V = [], [], []
        for r, c, B in zip(rows, cols, blocks):
            Bf = la.as_float(B) if isinstance(B, np.ndarray) else float(B) * np.eye(d)
            for i in range(d):
                for j in range(d):
                    if Bf[i, j] != 0:
                        R.append(r * d + i)
                        C.append(c * d + j)
                        V.append(Bf[i, j])
        return sp.csr_matrix((V, (R, C)), shape=(self.dim(m + 1), self.dim(m)))

    def kernel(self, m: int) -> np.ndarray:
        """Basis of ker d^m inside C^m."""
        if self.rho.exact:
            return la.exact_nullspace_of_dm(self._dm(m))
        A = self._sparse(m)
        return _float_kernel(A)

    def image(self, m: int) -> np.ndarray:
        """Basis of im d^m inside C^(m+1)."""
        if m == 0:
            return la.zeros((self.dim(1), 0), self.rho.exact)
        if self.rho.exact:
            M = self._dm(m)
            R, pivots = M.transpose().rref()
            Rn = la._from_dm(R)
            return np.ascontiguousarray(Rn[: len(pivots)].T)
        A = self._sparse(m)
        return _float_image(A)

    def check_square_zero(self, m: int) -> float:
        if self.rho.exact:
            P = self._dm(m + 1) * self._dm(m)
            return 0.0 if P.to_sdm() == {} or all(not r for r in P.to_sdm().values()) else float("inf")
        P = self._sparse(m + 1) @ self._sparse(m)
        return float(abs(P).max()) if P.nnz else 0.0


def _float_kernel(A) -> np.ndarray:
    n = A.shape[1]
    if A.shape[0] * n <= 4 * 10**6:
        return la.nullspace(A.toarray())
    Gm = (A.T @ A).toarray()
    w, V = np.linalg.eigh(Gm)
    cut = (1e-7 * np.sqrt(max(w[-1], 0))) ** 2
    return la._fix_signs(V[:, w <= cut])


def _float_image(A) -> np.ndarray:
    if A.shape[0] * A.shape[1] <= 4 * 10**6:
        return la.column_space(A.toarray())
    K = _float_kernel(A)
    n = A.shape[1]
    # image = A applied to the orthogonal complement of the kernel
    Q = la.nullspace(K.T) if K.shape[1] else np.eye(n)
    Y = A @ Q
    Y = np.asarray(Y)
    return la._orthonormal_columns(Y, 1e-7)


def hn(rho: Representation, n: int, budget: int = BAR_BUDGET) -> CohomologySummary:
    """Z^n = ker d^(n+1), B^n = im d^n inside C^(n+1)(G, V)^G."""
    if n < 0 or n > 3:
        raise ValueError("degree must be between 0 and 3")
    bc = BarComplex(rho, budget)
    if rho.group.order ** (n + 2) * rho.dim > budget:
        raise BudgetExceeded(f"degree {n} exceeds the bar-complex budget")
    if n >= 1 and bc.check_square_zero(n) > 1e-9:
        raise ArithmeticError("d^(n+1) d^n != 0")
    Z = bc.kernel(n + 1)
    B = bc.image(n)
    return _summary(Z, B, rho.exact, n)


def bar_cochain_value(bc: BarComplex, F: np.ndarray, full: tuple) -> np.ndarray:
    """f(g_1, ..., g_m) from coordinates F of f in C^m."""
    G, d = bc.G, bc.d
    g1 = full[0]
    t = tuple(int(G.table[G.inv[g1], x]) for x in full[1:])
    k = bc._index(t)
    return bc._mats[g1] @ F[k * d : (k + 1) * d]


def bar_averaging_primitive(bc: BarComplex, F: np.ndarray, m: int) -> np.ndarray:
    """For a cocycle f in C^m, h(g_1..g_{m-1}) = |G|^-1 sum_x f(x, g_1, ...)."""
    n, d = bc.n, bc.d
    exact = bc.rho.exact
    out = la.zeros((bc.dim(m - 1),), exact)
    for t in iproduct(range(n), repeat=m - 2):
        k = bc._index(t)
        acc = la.zeros((d,), exact)
        for x in range(n):
            acc = acc + bar_cochain_value(bc, F, (x, bc.G.identity) + t)
        out[k * d : (k + 1) * d] = acc * Fraction(1, n) if exact else acc / n
    return out


def apply_differential(bc: BarComplex, m: int, F: np.ndarray) -> np.ndarray:
    rows, cols, blocks = bc.differential(m)
    d = bc.d
    out = la.zeros((bc.dim(m + 1),), bc.rho.exact)
    for r, c, B in zip(rows, cols, blocks):
        out[r * d : (r + 1) * d] += B @ F[c * d : (c + 1) * d] if isinstance(B, np.ndarray) else B * F[c * d : (c + 1) * d]
    return out


# -- homogeneous <-> inhomogeneous in degree one -----------------------------

def hom_to_inhom(rho: Representation, F: np.ndarray) -> InhomCocycle:
    """Degree-1 homogeneous cocycle (coordinates F(t) = f(e, t)) to generator values."""
    G = rho.group
    d = rho.dim
    return InhomCocycle(rho, [F[s * d : (s + 1) * d] for s in G.generators])


def inhom_to_hom(b: InhomCocycle) -> np.ndarray:
    """Table f(g, h) = rho_g beta(g^-1 h) as an array of shape (|G|, |G|, d)."""
    rho = b.rep
    G = rho.group
    if not isinstance(G, FiniteTableGroup):
        raise UnsupportedFamily("materializing a homogeneous table needs a finite group")
    beta = [expand_word_cocycle(b, G.word_of(g)) for g in range(G.order)]
    out = np.empty((G.order, G.order, rho.dim), dtype=object if rho.exact else float)
    for g in range(G.order):
        M = rho.of_element(g)
        for h in range(G.order):
            out[g, h] = M @ beta[int(G.table[G.inv[g], h])]
    return out


def hom_table_to_inhom(rho: Representation, table: np.ndarray) -> InhomCocycle:
    G = rho.group
    return InhomCocycle(rho, [table[G.identity, s] for s in G.generators])


def inhom_to_bar(b: InhomCocycle) -> np.ndarray:
    """Bar coordinates of a degree-1 cocycle: F(t) = beta(t)."""
    G = b.rep.group
    return np.concatenate([expand_word_cocycle(b, G.word_of(g)) for g in range(G.order)])
