"""Ergodic projections, stationary decompositions, harmonic functions, states.

Finite-dimensional modules are reflexive, so the ergodic projection is an
operator on V itself; there is no separate bidual object.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import linalg as la
from .errors import NoConvergence, NotDirect, UnsupportedFamily
from .groups import (FiniteSupportMeasure, FiniteTableGroup, Subgroup, convolve,
                     subgroup_elements, support_subgroup, symmetric_opposite)
from .reps import (Representation, dual_representation, laplacian, markov_operator,
                   validate_representation)
from .words import Word


@dataclass
class ErgodicProjection:
    E: np.ndarray
    iterations: int
    residual: float
    cesaro_gap: float
    method: str

    def describe(self) -> dict:
        return {"E": la.to_jsonable(self.E), "iterations": self.iterations,
                "residual": self.residual, "cesaro_gap": self.cesaro_gap, "method": self.method}


def projection_defect(E, T) -> float:
    """max of ||E^2 - E||, ||T E - E||, ||E T - E|| (max-abs entries)."""
    return max(la.max_abs(E @ E - E), la.max_abs(T @ E - E), la.max_abs(E @ T - E))


# The mean only has to fix the rank of E; the splitting of Delta does the rest.
# Projections of different rank are at least 1 apart in operator norm, so a
# mean within this distance of the splitting confirms it.
RANK_CHECK = 0.25
# once rounding makes the means rebound, the best one is kept if it had settled
# this far; it only has to fix the rank, accuracy comes from the splitting
FLOOR_GAP = 1e-3


def _doubling_run(T: np.ndarray, tol: float, max_steps: int):
    """Cesaro means A_n with n = 2^k via A_2n = (A_n + T^n A_n) / 2."""
    d = T.shape[0]
    A = np.eye(d)
    Tn = T.copy()
    gaps = []
    best = None  # (relative gap, A, steps), smallest seen from n = 2^24 on
    steps = 0
    while True:
        A2 = 0.5 * (A + Tn @ A)
        gap = float(np.linalg.norm(A2 - A, 2))
        A, Tn = A2, Tn @ Tn
        steps += 1
        gaps.append(gap)
        scale = max(1.0, float(np.linalg.norm(A, 2))) if np.isfinite(gap) else np.inf
        if gap < tol * scale:
            return A, steps, gap, "converged"
        # the float floor of repeated squaring is about n * eps * cond; before
        # n = 2^24 a small or stalled gap may be unit-circle phases lining up or
        # a mode with |1 - lambda| ~ 1/n not yet decaying.  Past it, a stall
        # means the floor, and a rebound means rounding has taken over.
        if steps >= 24:
            if best is None or gap / scale < best[0]:
                best = (gap / scale, A, steps)
            if len(gaps) >= 4 and gap < 1e-5 * scale and gaps[-1] > 0.75 * gaps[-4]:
                return A, steps, gap, "floor"
            if best[0] < FLOOR_GAP and (not np.isfinite(gap) or gap / scale > 4 * best[0]):
                return best[1], best[2], best[0], "floor"
        if not np.isfinite(gap) or np.linalg.norm(A, 2) > 1e8:
            return A, steps, gap, "diverged"
        if steps >= max_steps:
            return A, steps, gap, "budget"


def _splitting(Delta: np.ndarray, r: int):
    """Projection onto the r-dim kernel of Delta along its image (float)."""
    d = Delta.shape[0]
    if r == 0:
        return np.zeros((d, d))
    _, _, Vt = np.linalg.svd(Delta)
    K = Vt[d - r :].T
    _, _, Wt = np.linalg.svd(Delta.T)
    L = Wt[d - r :].T
    return K @ np.linalg.solve(L.T @ K, L.T)


def exact_splitting(Delta: np.ndarray) -> np.ndarray:
    """E = K (L^T K)^-1 L^T with K = ker Delta, L = ker Delta^T."""
    d = Delta.shape[0]
    K = la.nullspace(Delta)
    L = la.nullspace(np.ascontiguousarray(Delta.T))
    if K.shape[1] == 0:
        return la.zeros((d, d), True)
    M = L.T @ K
    if la.rank(M) < M.shape[0]:
        raise NotDirect("kernel and image of the Laplacian intersect",
                        witness=la.to_jsonable(la.intersect(K, la.column_space(Delta))))
    return K @ la.inverse(M) @ L.T


def cesaro_projection(rho: Representation, mu: FiniteSupportMeasure, tol: float = 1e-10,
                      max_iter: int = 10**6) -> ErgodicProjection:
    """Limit of the Cesaro means (1/n) sum_{i<n} rho_mu^i.

    ``max_iter`` caps the number of doubling steps.  In floating point the
    means are refined to the exact projection onto ker(Delta) along
    im(Delta), with the dimension read off the Cesaro mean; the refinement
    must agree with the mean.  Rational inputs get the exact projection.
    """
    T = markov_operator(rho, mu)
    d = rho.dim
    if d == 0:
        return ErgodicProjection(T, 0, 0.0, 0.0, "empty")
    exact = la.is_exact(T)
    Tf = la.as_float(T)
    A, steps, gap, status = _doubling_run(Tf, tol, max(1, min(int(max_iter), 4096)))
    if status in ("diverged", "budget"):
        raise NoConvergence(f"Cesaro means did not settle ({status}, gap {gap:.3g})", residual=gap)
    Delta = la.eye(d, exact) - T
    if exact:
        E = exact_splitting(Delta)
        res = projection_defect(E, T)
        if np.linalg.norm(la.as_float(E) - A, 2) > RANK_CHECK:
            raise NoConvergence("Cesaro mean disagrees with the exact splitting", residual=gap)
        return ErgodicProjection(E, steps, float(res), gap, "exact-splitting")
    s = np.linalg.svd(A, compute_uv=False)
    r = int(np.sum(s > 0.5))
    E = _splitting(la.as_float(Delta), r)
    E[np.abs(E) < 1e-15] = 0.0
    dev = float(np.linalg.norm(E - A, 2))
    if dev > RANK_CHECK:
        raise NoConvergence(f"Cesaro mean and splitting disagree by {dev:.3g}", residual=dev)
    return ErgodicProjection(E, steps, projection_defect(E, Tf), gap, "cesaro+splitting")


def check_projection(P: ErgodicProjection, rho, mu, tol=1e-9) -> dict:
    """Projection identities plus im(E) = ker(Delta), ker(E) = im(Delta)."""
    T = markov_operator(rho, mu)
    E = P.E
    if not (la.is_exact(E) and la.is_exact(T)):
        E, T = la.as_float(E), la.as_float(T)
    D = la.eye(rho.dim, la.is_exact(T)) - T
    imE, kerE = la.column_space(E), la.nullspace(E)
    kerD, imD = la.nullspace(D), la.column_space(D)
    return {
        "idempotent": la.max_abs(E @ E - E) <= tol,
        "absorbs_markov": la.max_abs(T @ E - E) <= tol and la.max_abs(E @ T - E) <= tol,
        "image_is_fixed": la.same_span(imE, kerD, 1e-7),
        "kernel_is_image": la.same_span(kerE, imD, 1e-7),
        "residual": float(projection_defect(E, T)),
    }


# -- weak unique stationarity -----------------------------------------------

@dataclass
class StationaryDecomposition:
    V0: np.ndarray
    Vmu: np.ndarray
    change_of_basis: np.ndarray
    direct: bool
    residual: float

    def describe(self) -> dict:
        return {"dim_V0": self.V0.shape[1], "dim_Vmu": self.Vmu.shape[1], "direct": self.direct,
                "V0": la.to_jsonable(self.V0), "Vmu": la.to_jsonable(self.Vmu), "residual": self.residual}


def stationary_decomposition(rho: Representation, mu: FiniteSupportMeasure) -> StationaryDecomposition:
    D = laplacian(rho, mu)
    V0, Vmu = la.column_space(D), la.nullspace(D)
    C = la.hstack([V0, Vmu], rho.dim, la.is_exact(D))
    if la.is_exact(C):
        ok = C.shape[1] == rho.dim and la.rank(C) == rho.dim
        resid = 0.0
    else:
        s = np.linalg.svd(C, compute_uv=False) if C.size else np.array([1.0])
        resid = float(s[-1]) if C.shape[1] == rho.dim else 0.0
        ok = C.shape[1] == rho.dim and resid > 1e-9
    if not ok:
        raise NotDirect("im(Delta) + ker(Delta) is not all of V",
                        witness=la.to_jsonable(la.intersect(V0, Vmu)))
    return StationaryDecomposition(V0, Vmu, C, True, resid)


def weak_unique_stationarity_check(rho: Representation, mu: FiniteSupportMeasure) -> dict:
    """Every nonzero mu-check-invariant functional pairs with some V^mu vector."""
    dual = dual_representation(rho)
    mu_check = symmetric_opposite(mu)
    L = la.nullspace(laplacian(dual, mu_check))
    K = la.nullspace(laplacian(rho, mu))
    if L.shape[1] == 0:
        pair_rank = 0
    elif K.shape[1] == 0:
        pair_rank = 0
    else:
        M = L.T @ K
        pair_rank = la.rank(M if la.is_exact(M) else la.as_float(M), 1e-7)
    holds = pair_rank == L.shape[1]
    return {"weakly_uniquely_stationary": bool(holds), "dim_dual_fixed": L.shape[1],
            "dim_Vmu": K.shape[1], "pairing_rank": pair_rank}


def decomposition_agrees(rho, mu) -> bool:
    """Directness of V = im Delta + V^mu agrees with pairing nondegeneracy."""
    try:
        stationary_decomposition(rho, mu)
        direct = True
    except NotDirect:
        direct = False
    return direct == weak_unique_stationarity_check(rho, mu)["weakly_uniquely_stationary"]


# -- convex approximation ---------------------------------------------------

def convex_approximation(rho: Representation, mu: FiniteSupportMeasure, vectors, eps: float,
                         max_terms: int = 4096, max_atoms: int = 200000) -> dict:
    """Convex weights on words whose average moves each vector eps-close to E v.

    The weights are (1/N) sum_{l=1..N} mu^{*l}, which starts at mu itself;
    the residual is recomputed from the returned weights.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    G = rho.group
    if not G.has_normal_form:
        raise UnsupportedFamily("convolution powers need normal forms")
    E = cesaro_projection(rho, mu).E
    V = [la.coerce(np.asarray(v, dtype=object) if not isinstance(v, np.ndarray) else v, rho.exact) for v in vectors]
    targets = [la.as_float(E) @ la.as_float(v) for v in V]
    power = mu
    total: dict[Word, object] = {}
    images: dict[Word, np.ndarray] = {}
    for N in range(1, max_terms + 1):
        for w, p in power.items():
            total[w] = total.get(w, 0) + p
        if len(total) > max_atoms:
            break
        weights = {w: (p / N if isinstance(p, Fraction) else p / N) for w, p in total.items()}
        worst = 0.0
        for v, t in zip(V, targets):
            acc = np.zeros(rho.dim)
            for w, p in weights.items():
                if w not in images:
                    images[w] = la.as_float(rho.of(w))
                acc += float(p) * (images[w] @ la.as_float(v))
            worst = max(worst, float(np.linalg.norm(acc - t)))
        if worst < eps:
            return {"N": N, "weights": weights, "residual": worst}
        power = convolve(power, mu)
    raise NoConvergence(f"no convex combination within eps={eps} up to N={N}", residual=worst)


# -- harmonic functions on finite groups ------------------------------------

def _markov_on_functions(G: FiniteTableGroup, mu: FiniteSupportMeasure):
    n = G.order
    exact = mu.exact
    M = la.zeros((n, n), exact)
    for w, p in mu.items():
        h = G.elem(w)
        for g in range(n):
            M[g, int(G.table[g, h])] += p
    return M


@dataclass
class HarmonicFunctionSpace:
    group: FiniteTableGroup
    basis: np.ndarray

    @property
    def dim(self) -> int:
        return self.basis.shape[1]


def harmonic_function_space(G: FiniteTableGroup, mu: FiniteSupportMeasure) -> HarmonicFunctionSpace:
    """Functions with f(g) = sum_h mu(h) f(gh)."""
    M = _markov_on_functions(G, mu)
    return HarmonicFunctionSpace(G, la.nullspace(la.eye(G.order, la.is_exact(M)) - M))


def coset_count(G: FiniteTableGroup, mu: FiniteSupportMeasure) -> int:
    return G.order // len(subgroup_elements(G, support_subgroup(G, mu)))


def liouville_check(G: FiniteTableGroup, mu: FiniteSupportMeasure, tol: float = 1e-9) -> bool:
    """Every harmonic f satisfies f(gh) = f(g) for h in the support."""
    B = harmonic_function_space(G, mu).basis
    for w in mu.support():
        h = G.elem(w)
        perm = G.table[:, h]
        if not la.is_zero(B[perm] - B, tol):
            return False
    return True


def gmu_invariance_check(rho: Representation, mu: FiniteSupportMeasure, H: Subgroup,
                         E=None, tol: float = 1e-9) -> dict:
    if E is None:
        E = cesaro_projection(rho, mu).E
    worst = 0.0
    for h in H.generators:
        worst = max(worst, la.max_abs(E @ rho.of(h) - E))
    return {"pass": worst <= tol, "max_residual": worst}


# -- stationary states on finite-dimensional C*-algebras ---------------------

def _hermitian_basis(n: int):
    """Hilbert-Schmidt orthonormal basis of the n x n Hermitian matrices."""
    out = []
    for j in range(n):
        E = np.zeros((n, n), dtype=complex)
        E[j, j] = 1.0
        out.append(E)
    r = 1 / np.sqrt(2)
    for j in range(n):
        for k in range(j + 1, n):
            S = np.zeros((n, n), dtype=complex)
            S[j, k] = S[k, j] = r
            A = np.zeros((n, n), dtype=complex)
            A[j, k], A[k, j] = 1j * r, -1j * r
            out += [S, A]
    return out


@dataclass
class MatrixAlgebraAction:
    """A group acting on a direct sum of full matrix blocks.

    Generator s sends block i to block perm[s][i] by a -> U a U^*, with
    ``U = unitaries[s][i]``.
    """

    group: FiniteTableGroup
    blocks: list
    perms: list
    unitaries: list
    _coords: list = field(default=None, repr=False)

    def __post_init__(self):
        G = self.group
        if len(self.perms) != G.ngens or len(self.unitaries) != G.ngens:
            raise ValueError("one block permutation and conjugator list per generator")
        for p, us in zip(self.perms, self.unitaries):
            if sorted(p) != list(range(len(self.blocks))):
                raise ValueError("block map is not a permutation")
            for i, U in enumerate(us):
                U = np.asarray(U, dtype=complex)
                if self.blocks[p[i]] != self.blocks[i] or U.shape != (self.blocks[i],) * 2:
                    raise ValueError("block permutation must preserve block sizes")
                if not np.allclose(U.conj().T @ U, np.eye(self.blocks[i]), atol=1e-10):
                    raise ValueError("conjugator is not unitary")
        self._coords = []
        for b, n in enumerate(self.blocks):
            for H in _hermitian_basis(n):
                self._coords.append((b, H))

    @property
    def real_dim(self) -> int:
        return len(self._coords)

    def apply(self, s: int, a: list) -> list:
        out = [None] * len(self.blocks)
        for i, ai in enumerate(a):
            U = np.asarray(self.unitaries[s][i], dtype=complex)
            out[self.perms[s][i]] = U @ ai @ U.conj().T
        return out

    def element(self, x) -> list:
        a = [np.zeros((n, n), dtype=complex) for n in self.blocks]
        for c, (b, H) in zip(x, self._coords):
            a[b] = a[b] + c * H
        return a

    def coords(self, a) -> np.ndarray:
        return np.array([float(np.real(np.trace(H @ a[b]))) for b, H in self._coords])

    def linear_representation(self) -> Representation:
        """The action on the Hermitian part in orthonormal real coordinates."""
        mats = []
        for s in range(self.group.ngens):
            cols = []
            for k in range(self.real_dim):
                e = np.zeros(self.real_dim)
                e[k] = 1.0
                cols.append(self.coords(self.apply(s, self.element(e))))
            mats.append(np.column_stack(cols))
        rho = Representation(self.group, mats, exact=False, dim=self.real_dim)
        validate_representation(rho, 1e-8)
        return rho

    def trace_state(self) -> np.ndarray:
        N = sum(self.blocks)
        return self.coords([np.eye(n, dtype=complex) / N for n in self.blocks])

    def unit(self) -> np.ndarray:
        return self.coords([np.eye(n, dtype=complex) for n in self.blocks])

    def densities(self, x) -> list:
        return self.element(x)


def stationary_states(A: MatrixAlgebraAction, mu: FiniteSupportMeasure, tol: float = 1e-10) -> dict:
    """States with tau = sum_g mu(g) tau o alpha_g.

    States are densities D (tau(a) = sum_i tr(D_i a_i)); in orthonormal
    Hermitian coordinates tau o alpha_g is rho_g^T applied to D.
    """
    rho = A.linear_representation()
    T = la.as_float(markov_operator(rho, mu))
    F = la.nullspace(np.eye(A.real_dim) - T.T)
    unit = A.unit()
    x0 = A.trace_state()
    x0 = F @ (F.T @ x0)
    x0 = x0 / float(unit @ x0)
    ev = min(float(np.min(np.linalg.eigvalsh(D))) for D in A.densities(x0))
    if ev < -tol:
        raise ValueError("interior point is not positive")
    # directions of the affine hull: fixed functionals vanishing on the unit
    tr = F.T @ unit
    dirs = F @ la.nullspace(tr.reshape(1, -1)) if F.shape[1] else np.zeros((A.real_dim, 0))
    dirs = la.column_space(dirs) if dirs.shape[1] else dirs
    return {"affine_dim": F.shape[1] - 1, "unique": F.shape[1] == 1, "point": x0,
            "directions": dirs, "densities": A.densities(x0), "min_eigenvalue": ev}


def unique_stationarity_equivalence(A: MatrixAlgebraAction, mu: FiniteSupportMeasure) -> dict:
    """Unique mu-check-stationary state versus weak unique mu-stationarity."""
    rho = A.linear_representation()
    fixed_alg = la.nullspace(np.eye(A.real_dim) - la.as_float(markov_operator(rho, mu)))
    scalars = fixed_alg.shape[1] == 1
    unique = stationary_states(A, symmetric_opposite(mu))["unique"]
    wus = weak_unique_stationarity_check(rho, mu)["weakly_uniquely_stationary"]
    if scalars:
        ok = unique == wus
        clause = "equivalence"
    else:
        ok = (not unique) or wus
        clause = "forward"
    return {"pass": bool(ok), "fixed_algebra_is_scalar": scalars, "uniquely_stationary": unique,
            "weakly_uniquely_stationary": wus, "clause": clause}
