"""Finite-dimensional representations, Markov operators and fixed spaces."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import scipy.linalg

from . import linalg as la
from .errors import NoCertificate, RelatorViolation
from .groups import FiniteSupportMeasure, FiniteTableGroup, Group, Subgroup
from .words import Word

RELATOR_TOL = 1e-9


@dataclass(frozen=True)
class IsometryCertificate:
    """``rho_s^T P rho_s = P`` for every generator; ``bound`` is sup ||rho_g||_2."""

    P: np.ndarray
    bound: float

    def describe(self) -> dict:
        return {"P": la.to_jsonable(self.P), "bound": self.bound}


class Representation:
    """Generator images ``images[i]`` acting on column vectors.

    Words act left to right: ``rho(s1 s2) = rho(s1) @ rho(s2)``.
    """

    def __init__(self, group: Group, images, exact: bool | None = None, norm_kind="2", dim: int | None = None):
        self.group = group
        mats = [np.asarray(m) if isinstance(m, np.ndarray) else np.asarray(m, dtype=object) for m in images]
        if exact is None:
            exact = all(_all_rational(m) for m in mats)
        self.exact = exact
        self.images = [la.coerce(m, exact) for m in mats]
        if len(self.images) != group.ngens:
            raise ValueError(f"{group.ngens} generator images required, got {len(self.images)}")
        dims = {m.shape for m in self.images}
        if len(dims) > 1 or any(s[0] != s[1] for s in dims):
            raise ValueError("generator images must be square matrices of one size")
        self.dim = self.images[0].shape[0] if self.images else (dim or 0)
        if dim is not None and dim != self.dim:
            raise ValueError("declared dimension does not match the images")
        self.norm_kind = norm_kind
        self._inverses = None
        self._elem_cache: dict[int, np.ndarray] = {}
        self._cert = None

    @classmethod
    def trivial(cls, group: Group, dim: int = 1, exact: bool = True):
        return cls(group, [la.eye(dim, exact) for _ in range(group.ngens)], exact, dim=dim)

    @property
    def inverses(self) -> list[np.ndarray]:
        if self._inverses is None:
            self._inverses = [la.inverse(m) for m in self.images]
        return self._inverses

    def eye(self) -> np.ndarray:
        return la.eye(self.dim, self.exact)

    def zeros(self, *shape) -> np.ndarray:
        return la.zeros(shape or (self.dim,), self.exact)

    def of(self, w: Word) -> np.ndarray:
        """Image of a word."""
        if isinstance(w, str):
            w = self.group.parse(w)
        out = self.eye()
        for g, e in w.letters:
            m = self.images[g] if e > 0 else self.inverses[g]
            for _ in range(abs(e)):
                out = out @ m
        return out

    def of_element(self, g: int) -> np.ndarray:
        """Image of an element of a finite table group, cached."""
        G = self.group
        if g not in self._elem_cache:
            self._elem_cache[g] = self.of(G.word_of(g))
        return self._elem_cache[g]

    def describe(self) -> dict:
        return {"dim": self.dim, "scalars": "rational" if self.exact else "float",
                "images": {n: la.to_jsonable(m) for n, m in zip(self.group.names, self.images)}}


def _all_rational(m) -> bool:
    m = np.asarray(m, dtype=object)
    for v in m.flat:
        if isinstance(v, (float, np.floating)) and not float(v).is_integer():
            return False
        if isinstance(v, str) and not _rational_text(v):
            return False
    return True


def _rational_text(s: str) -> bool:
    try:
        Fraction(s.strip())
    except ValueError:
        return False
    return "." not in s and "e" not in s.lower()


def validate_representation(rho: Representation, tol: float = RELATOR_TOL) -> dict:
    """Check invertibility and that every relator maps to the identity."""
    for name, m in zip(rho.group.names, rho.images):
        if not la.is_invertible(m):
            raise RelatorViolation(f"image of {name} is not invertible", relator=name)
    worst = 0.0
    I = rho.eye()
    for r in rho.group.relators():
        D = rho.of(r) - I
        res = la.max_abs(D) if rho.exact else float(np.linalg.norm(la.as_float(D), 2))
        worst = max(worst, res)
        if (rho.exact and res != 0) or (not rho.exact and res > tol):
            raise RelatorViolation(f"relator {rho.group.fmt(r)} does not act trivially (residual {res:.3g})",
                                   relator=rho.group.fmt(r), residual=res)
    return {"valid": True, "max_relator_residual": worst, "relators_checked": len(rho.group.relators())}


# -- certificates and norms --------------------------------------------------

def _sym_basis(d: int, exact: bool):
    basis = []
    for i in range(d):
        for j in range(i, d):
            E = la.zeros((d, d), exact)
            E[i, j] = E[j, i] = Fraction(1) if exact else 1.0
            basis.append(E)
    return basis


def _is_pd(P, tol=1e-12) -> bool:
    Pf = la.as_float(P)
    if Pf.size == 0:
        return True
    w = np.linalg.eigvalsh((Pf + Pf.T) / 2)
    return bool(w[0] > tol * max(1.0, abs(w[-1])))


def _bound(P) -> float:
    Pf = la.as_float(P)
    if Pf.size == 0:
        return 1.0
    w = np.linalg.eigvalsh((Pf + Pf.T) / 2)
    return float(np.sqrt(w[-1] / w[0]))


def certify_isometric(rho: Representation, seed: int = 0) -> IsometryCertificate:
    """Find a positive-definite P with ``rho_s^T P rho_s = P`` for all generators."""
    d, exact = rho.dim, rho.exact
    if d == 0:
        return IsometryCertificate(la.zeros((0, 0), exact), 1.0)
    G = rho.group
    if isinstance(G, FiniteTableGroup):
        P = la.zeros((d, d), exact)
        for g in range(G.order):
            m = rho.of_element(g)
            P = P + m.T @ m
        P = P / G.order if not exact else P * Fraction(1, G.order)
        return IsometryCertificate(P, _bound(P))
    I = la.eye(d, exact)
    if all(la.is_zero(m.T @ m - I, 1e-12) for m in rho.images):
        return IsometryCertificate(I, 1.0)
    basis = _sym_basis(d, exact)
    # linear constraints rho_s^T E rho_s - E over the symmetric basis
    cols = []
    for E in basis:
        parts = [(m.T @ E @ m - E).reshape(-1) for m in rho.images]
        cols.append(np.concatenate(parts) if parts else la.zeros((0,), exact))
    A = np.column_stack(cols)
    K = la.nullspace(A)
    if K.shape[1] == 0:
        raise NoCertificate("no nonzero invariant symmetric form")
    sols = [sum((K[k, j] * basis[k] for k in range(len(basis))), la.zeros((d, d), exact)) for j in range(K.shape[1])]
    candidates = []
    # Frobenius projection of the identity onto the invariant forms
    gram = np.array([[np.sum(a * b) for b in sols] for a in sols], dtype=object if exact else float)
    rhs = np.array([np.trace(a) for a in sols], dtype=object if exact else float)
    c = la.solve(gram, rhs)
    if c is not None:
        candidates.append(sum((c[j] * sols[j] for j in range(len(sols))), la.zeros((d, d), exact)))
    for S in sols:
        candidates += [S, -S]
    rng = np.random.default_rng(seed)
    solsf = [la.as_float(S) for S in sols]
    for _ in range(64):
        w = rng.standard_normal(len(sols))
        candidates.append(sum(w[j] * solsf[j] for j in range(len(sols))))
    for P in candidates:
        if _is_pd(P):
            return IsometryCertificate(P, _bound(P))
    raise NoCertificate("invariant symmetric forms contain no positive-definite point found")


def certificate(rho: Representation) -> IsometryCertificate | None:
    """Cached certificate or None."""
    if rho._cert is None:
        try:
            rho._cert = certify_isometric(rho)
        except NoCertificate:
            rho._cert = False
    return rho._cert or None


def operator_norm(T, kind="2", P=None) -> float:
    """Operator norm for p = 1, 2, inf, or the norm induced by a form P."""
    Tf = la.as_float(T)
    if Tf.size == 0:
        return 0.0
    kind = str(kind)
    if kind == "1":
        return float(np.max(np.sum(np.abs(Tf), axis=0)))
    if kind in ("inf", "∞"):
        return float(np.max(np.sum(np.abs(Tf), axis=1)))
    if P is None:
        return float(np.linalg.norm(Tf, 2))
    Pf = la.as_float(P)
    w = scipy.linalg.eigh(Tf.T @ Pf @ Tf, Pf, eigvals_only=True)
    return float(np.sqrt(max(w[-1], 0.0)))


def certified_norm(rho: Representation, T) -> float:
    cert = certificate(rho)
    if cert is None:
        return operator_norm(T, rho.norm_kind)
    return operator_norm(T, "P", cert.P)


def dual_representation(rho: Representation) -> Representation:
    return Representation(rho.group, [np.ascontiguousarray(m.T) for m in rho.inverses], rho.exact, dim=rho.dim)


# -- Markov operators and fixed spaces --------------------------------------

def markov_operator(rho: Representation, mu: FiniteSupportMeasure) -> np.ndarray:
    exact = rho.exact and mu.exact
    T = la.zeros((rho.dim, rho.dim), exact)
    for w, p in mu.items():
        m = rho.of(w)
        T = T + (p * m if exact else float(p) * la.as_float(m))
    return T


def laplacian(rho: Representation, mu: FiniteSupportMeasure) -> np.ndarray:
    T = markov_operator(rho, mu)
    return la.eye(rho.dim, la.is_exact(T)) - T


def fixed_space(rho: Representation, H: Subgroup | None = None) -> np.ndarray:
    """Basis of the vectors fixed by every generator of H (default: the group)."""
    gens = rho.group.gens() if H is None else list(H.generators)
    I = rho.eye()
    if not gens:
        return I
    A = np.vstack([rho.of(h) - I for h in gens])
    return la.nullspace(A)


def mu_fixed_space(rho: Representation, mu: FiniteSupportMeasure) -> np.ndarray:
    return la.nullspace(laplacian(rho, mu))


def almost_invariant_margin(rho: Representation, S=None, cert: IsometryCertificate | None = None) -> float:
    """kappa with kappa^2 the least eigenvalue of sum_s (I-rho_s)^T P (I-rho_s) against P."""
    if cert is None:
        cert = certificate(rho)
        if cert is None:
            raise NoCertificate("margin needs an isometry certificate")
    if rho.dim == 0:
        return float("inf")
    S = rho.group.gens() if S is None else list(S)
    P = la.as_float(cert.P)
    I = np.eye(rho.dim)
    Q = np.zeros((rho.dim, rho.dim))
    for s in S:
        D = I - la.as_float(rho.of(s))
        Q += D.T @ P @ D
    w = scipy.linalg.eigh((Q + Q.T) / 2, P, eigvals_only=True)
    val = max(float(w[0]), 0.0)
    k = float(np.sqrt(val))
    return 0.0 if k < 1e-7 else k


# -- derived representations ------------------------------------------------

def restrict_representation(rho: Representation, H: Subgroup) -> Representation:
    """The representation of H's abstract group obtained through its embedding."""
    A, emb = H.as_group()
    return Representation(A, [rho.of(w) for w in emb.images], rho.exact, dim=rho.dim)


def pullback_representation(rho: Representation, hom) -> Representation:
    """rho composed with a homomorphism into rho.group."""
    return Representation(hom.source, [rho.of(w) for w in hom.images], rho.exact, dim=rho.dim)


def subrepresentation(rho: Representation, basis: np.ndarray, tol: float = 1e-8) -> Representation:
    """Action on an invariant subspace in the coordinates of ``basis``."""
    k = basis.shape[1]
    mats = []
    for m in rho.images:
        img = m @ basis
        if rho.exact and la.is_exact(basis):
            c = la.solve(basis, img)
            if c is None:
                raise ValueError("subspace is not invariant")
        else:
            Bf = la.as_float(basis)
            c = np.linalg.lstsq(Bf, la.as_float(img), rcond=None)[0] if k else np.zeros((0, 0))
            imgf = la.as_float(img)
            if k and np.linalg.norm(Bf @ c - imgf) > tol * (1 + np.linalg.norm(imgf)):
                raise ValueError("subspace is not invariant")
        mats.append(c)
    exact = rho.exact and la.is_exact(basis)
    return Representation(rho.group, mats, exact, dim=k)


def block_sum(r1: Representation, r2: Representation) -> Representation:
    exact = r1.exact and r2.exact
    mats = []
    for a, b in zip(r1.images, r2.images):
        M = la.zeros((r1.dim + r2.dim,) * 2, exact)
        M[: r1.dim, : r1.dim] = la.coerce(a, exact)
        M[r1.dim :, r1.dim :] = la.coerce(b, exact)
        mats.append(M)
    return Representation(r1.group, mats, exact, dim=r1.dim + r2.dim)
