"""Dense linear algebra over two scalar kinds.

Exact matrices are numpy object arrays of :class:`fractions.Fraction`; the
heavy lifting (row reduction, kernels) is delegated to sympy's
``DomainMatrix`` over QQ.  Float matrices are ``float64`` arrays and rank
decisions use a singular-value cutoff relative to max(largest singular value, 1).

Subspaces are always passed around as column-basis matrices.  Exact bases are
in reduced column-echelon form (the transpose of the RREF of the span), which
is unique for a subspace.  Float bases are orthonormal with a sign convention,
which is deterministic but not unique.
"""
from __future__ import annotations

from fractions import Fraction
from numbers import Rational

import numpy as np
from sympy import QQ
from sympy.polys.matrices import DomainMatrix

RANK_RTOL = 1e-9


class LinalgError(ValueError):
    pass


# -- scalar handling --------------------------------------------------------

def parse_scalar(x, exact: bool = True):
    """Parse ``"p/q"`` strings, ints, Fractions or floats."""
    if isinstance(x, str):
        s = x.strip()
        if exact:
            return Fraction(s)
        return float(Fraction(s)) if "/" in s else float(s)
    if exact:
        if isinstance(x, (bool, np.bool_)):
            return Fraction(int(x))
        if isinstance(x, (int, np.integer, Rational)):
            return Fraction(x)
        if isinstance(x, (float, np.floating)):
            f = float(x)
            if f.is_integer():
                return Fraction(int(f))
            raise LinalgError(f"float {x!r} in exact context")
        raise LinalgError(f"cannot read scalar {x!r}")
    return float(x)


def is_exact(a) -> bool:
    return isinstance(a, np.ndarray) and a.dtype == object


def as_exact(a) -> np.ndarray:
    a = np.asarray(a, dtype=object)
    out = np.empty(a.shape, dtype=object)
    for idx, v in np.ndenumerate(a):
        out[idx] = parse_scalar(v, True)
    return out


def as_float(a) -> np.ndarray:
    a = np.asarray(a)
    if a.dtype == object:
        return np.vectorize(float, otypes=[float])(a) if a.size else np.zeros(a.shape)
    return a.astype(float)


def coerce(a, exact: bool) -> np.ndarray:
    return as_exact(a) if exact else as_float(a)


def eye(n: int, exact: bool) -> np.ndarray:
    if exact:
        out = np.full((n, n), Fraction(0), dtype=object)
        for i in range(n):
            out[i, i] = Fraction(1)
        return out
    return np.eye(n)


def zeros(shape, exact: bool) -> np.ndarray:
    if exact:
        return np.full(shape, Fraction(0), dtype=object)
    return np.zeros(shape)


def max_abs(a) -> float:
    a = np.asarray(a)
    if a.size == 0:
        return 0.0
    if a.dtype == object:
        return float(max(abs(v) for v in a.flat))
    return float(np.max(np.abs(a)))


def is_zero(a, tol: float = 0.0) -> bool:
    a = np.asarray(a)
    if a.dtype == object:
        return all(v == 0 for v in a.flat)
    return max_abs(a) <= tol


def norm2(a) -> float:
    return float(np.linalg.norm(as_float(a)))


def hstack(blocks, rows: int, exact: bool) -> np.ndarray:
    blocks = [b for b in blocks if b.shape[1]]
    if not blocks:
        return zeros((rows, 0), exact)
    return np.hstack(blocks)


# -- sympy bridge -----------------------------------------------------------

def _to_dm(a: np.ndarray) -> DomainMatrix:
    m, n = a.shape
    rows = {}
    for i in range(m):
        r = {}
        for j in range(n):
            v = a[i, j]
            if v != 0:
                r[j] = QQ(v.numerator, v.denominator)
        if r:
            rows[i] = r
    return DomainMatrix(rows, (m, n), QQ)


def _from_dm(M: DomainMatrix) -> np.ndarray:
    m, n = M.shape
    out = zeros((m, n), True)
    for i, row in M.to_sdm().items():
        for j, v in row.items():
            out[i, j] = Fraction(int(v.numerator), int(v.denominator))
    return out


def rref(a: np.ndarray) -> tuple[np.ndarray, tuple[int, ...]]:
    """Reduced row echelon form of an exact matrix."""
    if a.shape[0] == 0 or a.shape[1] == 0:
        return a.copy(), ()
    R, pivots = _to_dm(a).rref()
    return _from_dm(R), tuple(pivots)


def exact_rank_of_dm(M: DomainMatrix) -> int:
    if M.shape[0] == 0 or M.shape[1] == 0:
        return 0
    return len(M.rref()[1])


def exact_nullspace_of_dm(M: DomainMatrix) -> np.ndarray:
    n = M.shape[1]
    if M.shape[0] == 0:
        return eye(n, True)
    R, pivots = M.rref()
    return _kernel_from_rref(_from_dm(R) if R.shape[0] else zeros((0, n), True), pivots, n)


def _kernel_from_rref(R: np.ndarray, pivots, n: int) -> np.ndarray:
    free = [j for j in range(n) if j not in set(pivots)]
    K = zeros((n, len(free)), True)
    for k, f in enumerate(free):
        K[f, k] = Fraction(1)
        for r, p in enumerate(pivots):
            K[p, k] = -R[r, f]
    return K


# -- float helpers ----------------------------------------------------------

def _svd_rank(s: np.ndarray, rtol: float) -> int:
    # relative to the largest singular value, but never below rtol itself so
    # that pure rounding noise (e.g. I - T with T = I numerically) has rank 0
    if s.size == 0:
        return 0
    return int(np.sum(s > rtol * max(s[0], 1.0)))


def _fix_signs(Q: np.ndarray) -> np.ndarray:
    Q = Q.copy()
    for k in range(Q.shape[1]):
        col = Q[:, k]
        i = int(np.argmax(np.abs(col) > 1e-12 * (np.max(np.abs(col)) or 1.0)))
        if col[i] < 0:
            Q[:, k] = -col
    Q[np.abs(Q) < 1e-15] = 0.0
    return Q


def _orthonormal_columns(a: np.ndarray, rtol: float) -> np.ndarray:
    if a.shape[1] == 0 or a.shape[0] == 0:
        return np.zeros((a.shape[0], 0))
    U, s, _ = np.linalg.svd(a, full_matrices=False)
    r = _svd_rank(s, rtol)
    return _fix_signs(U[:, :r])


# -- public operations ------------------------------------------------------

def rank(a: np.ndarray, rtol: float = RANK_RTOL) -> int:
    if a.size == 0:
        return 0
    if is_exact(a):
        return exact_rank_of_dm(_to_dm(a))
    return _svd_rank(np.linalg.svd(a, compute_uv=False), rtol)


def nullspace(a: np.ndarray, rtol: float = RANK_RTOL) -> np.ndarray:
    """Basis of the kernel of ``a`` as columns."""
    m, n = a.shape
    if is_exact(a):
        if m == 0:
            return eye(n, True)
        R, pivots = rref(a)
        return _kernel_from_rref(R, pivots, n)
    if m == 0 or n == 0:
        return np.eye(n)
    _, s, Vt = np.linalg.svd(a, full_matrices=True)
    r = _svd_rank(s, rtol)
    return _fix_signs(Vt[r:].T.copy())


def column_space(a: np.ndarray, rtol: float = RANK_RTOL) -> np.ndarray:
    """Canonical basis of the span of the columns of ``a``."""
    m = a.shape[0]
    if is_exact(a):
        if a.shape[1] == 0:
            return zeros((m, 0), True)
        R, pivots = rref(np.ascontiguousarray(a.T))
        return np.ascontiguousarray(R[: len(pivots)].T)
    return _orthonormal_columns(a, rtol)


def solve(A: np.ndarray, b: np.ndarray, rtol: float = RANK_RTOL):
    """One solution of ``A x = b`` (1-d or 2-d ``b``).

    Exact: returns the solution with free variables set to zero, or None.
    Float: returns the minimum-norm least-squares solution; the caller judges
    the residual.
    """
    vec = b.ndim == 1
    B = b.reshape(-1, 1) if vec else b
    m, n = A.shape
    if is_exact(A):
        if n == 0:
            if not is_zero(B):
                return None
            x = zeros((0, B.shape[1]), True)
            return x[:, 0] if vec else x
        aug = np.hstack([A, B])
        R, pivots = rref(aug)
        if any(p >= n for p in pivots):
            return None
        x = zeros((n, B.shape[1]), True)
        for r, p in enumerate(pivots):
            x[p] = R[r, n:]
        return x[:, 0] if vec else x
    if n == 0:
        x = np.zeros((0, B.shape[1]))
    else:
        x = np.linalg.lstsq(A, B, rcond=rtol)[0]
    return x[:, 0] if vec else x


def inverse(A: np.ndarray) -> np.ndarray:
    n = A.shape[0]
    if is_exact(A):
        X = solve(A, eye(n, True))
        if X is None or rank(A) < n:
            raise LinalgError("matrix is singular")
        return X
    return np.linalg.inv(A)


def is_invertible(A: np.ndarray, rtol: float = RANK_RTOL) -> bool:
    return A.shape[0] == A.shape[1] and rank(A, rtol) == A.shape[0]


def in_span(U: np.ndarray, v: np.ndarray, tol: float = 1e-9) -> bool:
    """Whether every column of ``v`` lies in the column span of ``U``."""
    V = v.reshape(-1, 1) if v.ndim == 1 else v
    if V.shape[1] == 0:
        return True
    if U.shape[1] == 0:
        return is_zero(V, tol)
    if is_exact(U) and is_exact(V):
        return solve(U, V) is not None
    U, V = as_float(U), as_float(V)
    Q = _orthonormal_columns(U, RANK_RTOL)
    resid = V - Q @ (Q.T @ V)
    return np.linalg.norm(resid) <= tol * (1.0 + np.linalg.norm(V))


def same_span(U: np.ndarray, W: np.ndarray, tol: float = 1e-9) -> bool:
    exact = is_exact(U) and is_exact(W)
    rU = rank(U) if U.shape[1] else 0
    rW = rank(W) if W.shape[1] else 0
    if rU != rW:
        return False
    return in_span(U, W, tol) if not exact else in_span(U, W)


def intersect(U: np.ndarray, W: np.ndarray, rtol: float = RANK_RTOL) -> np.ndarray:
    exact = is_exact(U)
    if U.shape[1] == 0 or W.shape[1] == 0:
        return zeros((U.shape[0], 0), exact)
    K = nullspace(np.hstack([U, -W]), rtol)
    return column_space(U @ K[: U.shape[1]], rtol)


def complement(Z: np.ndarray, B: np.ndarray, rtol: float = RANK_RTOL) -> np.ndarray:
    """Columns spanning a complement of span(B) inside span(Z).

    Exact: greedy canonical pivoting over the columns of Z, each kept column
    reduced modulo B.  Float: orthonormal basis of Z intersected with the
    orthogonal complement of B.
    """
    m = Z.shape[0]
    if is_exact(Z):
        chosen = []
        cur = B
        r = rank(cur) if cur.shape[1] else 0
        for k in range(Z.shape[1]):
            trial = np.hstack([cur, Z[:, k : k + 1]]) if cur.shape[1] else Z[:, k : k + 1]
            rt = rank(trial)
            if rt > r:
                chosen.append(Z[:, k])
                cur, r = trial, rt
        if not chosen:
            return zeros((m, 0), True)
        C = np.column_stack(chosen)
        if B.shape[1]:
            C = reduce_modulo(C, B)
        return C
    Zf, Bf = as_float(Z), as_float(B)
    Qb = _orthonormal_columns(Bf, rtol) if Bf.shape[1] else np.zeros((m, 0))
    Qz = _orthonormal_columns(Zf, rtol)
    P = Qz - Qb @ (Qb.T @ Qz)
    if P.shape[1] == 0:
        return np.zeros((m, 0))
    # singular values of P are sines of principal angles: absolute cutoff
    U, s, _ = np.linalg.svd(P, full_matrices=False)
    return _fix_signs(U[:, : int(np.sum(s > 1e-7))])


def reduce_modulo(C: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Exact: clear the pivot coordinates of the echelon basis of B from C."""
    Bc = column_space(B)
    R = np.ascontiguousarray(Bc.T)
    C = C.copy()
    for r in range(R.shape[0]):
        row = R[r]
        p = next(j for j, v in enumerate(row) if v != 0)
        for k in range(C.shape[1]):
            c = C[p, k]
            if c != 0:
                C[:, k] = C[:, k] - c * row
    return C


def coordinates(U: np.ndarray, v: np.ndarray):
    """Coefficients ``c`` with ``U c = v``; None when ``v`` is outside the span."""
    if is_exact(U) and is_exact(v):
        return solve(U, v)
    Uf, vf = as_float(U), as_float(v)
    c = solve(Uf, vf)
    resid = Uf @ c - vf
    if np.linalg.norm(resid) > 1e-8 * (1.0 + np.linalg.norm(vf)):
        return None
    return c


def kron_eye(k: int, A: np.ndarray) -> np.ndarray:
    """Block-diagonal matrix with ``k`` copies of ``A``."""
    exact = is_exact(A)
    d0, d1 = A.shape
    out = zeros((k * d0, k * d1), exact)
    for i in range(k):
        out[i * d0 : (i + 1) * d0, i * d1 : (i + 1) * d1] = A
    return out


def fmt_scalar(v):
    """JSON-friendly scalar: exact values become ``"p/q"`` strings."""
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (np.floating, float)):
        return float(v)
    if isinstance(v, (np.integer, int)):
        return int(v)
    return v


def to_jsonable(a):
    a = np.asarray(a)
    if a.ndim == 0:
        return fmt_scalar(a.item())
    return [to_jsonable(x) for x in a]
