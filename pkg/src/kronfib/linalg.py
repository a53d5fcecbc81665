"""Exact elimination over F_p and Q.

Prime fields use numpy int64 arrays (entries kept in [0, p)).  Large
full-rank kernels go through a recursive LU that stores residues in float64
and does its trailing updates with BLAS matmul; every intermediate is an
integer below 2**53, so the arithmetic is exact.  The rational field uses
Python ints and Fractions with fraction-free (Bareiss) elimination.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

DEFAULT_PRIME = 32003

# float64 holds integers exactly up to 2**53
_EXACT = 2 ** 53


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    for d in range(3, math.isqrt(n) + 1, 2):
        if n % d == 0:
            return False
    return True


@dataclass(frozen=True)
class FieldSpec:
    kind: str = "fp"
    p: int | None = DEFAULT_PRIME

    def __post_init__(self):
        if self.kind == "fp":
            if self.p is None or not is_prime(self.p):
                raise ValueError(f"prime field needs a prime order, got {self.p}")
            if self.p >= 2 ** 31:
                raise ValueError("prime must be below 2**31 for int64 elimination")
        elif self.kind == "q":
            if self.p is not None:
                object.__setattr__(self, "p", None)
        else:
            raise ValueError(f"unknown field kind {self.kind!r}")

    @classmethod
    def fp(cls, p: int = DEFAULT_PRIME) -> "FieldSpec":
        return cls("fp", p)

    @classmethod
    def rationals(cls) -> "FieldSpec":
        return cls("q", None)

    @property
    def is_prime_field(self) -> bool:
        return self.kind == "fp"

    def to_json(self) -> dict:
        if self.kind == "fp":
            return {"kind": "fp", "p": self.p}
        return {"kind": "q"}

    def __str__(self):
        return f"F_{self.p}" if self.kind == "fp" else "Q"


# ---------------------------------------------------------------- F_p, small

def rref_modp(M, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over F_p and the pivot columns."""
    R = np.array(M, dtype=np.int64) % p
    m, n = R.shape
    pivots: list[int] = []
    r = 0
    for c in range(n):
        if r == m:
            break
        nz = np.flatnonzero(R[r:, c])
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            R[[r, i], c:] = R[[i, r], c:]
        inv = pow(int(R[r, c]), -1, p)
        R[r, c:] = R[r, c:] * inv % p
        col = R[:, c].copy()
        col[r] = 0
        rows = np.flatnonzero(col)
        if rows.size:
            R[rows, c:] = (R[rows, c:] - np.outer(col[rows], R[r, c:])) % p
        pivots.append(c)
        r += 1
    return R, pivots


def rank_modp(M, p: int) -> int:
    """Rank over F_p by forward elimination (no back substitution)."""
    R = np.array(M, dtype=np.int64) % p
    m, n = R.shape
    if m == 0 or n == 0:
        return 0
    if n > m:
        R = np.ascontiguousarray(R.T)
        m, n = n, m
    r = 0
    for c in range(n):
        if r == m:
            break
        nz = np.flatnonzero(R[r:, c])
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            R[[r, i], c:] = R[[i, r], c:]
        inv = pow(int(R[r, c]), -1, p)
        R[r, c:] = R[r, c:] * inv % p
        below = R[r + 1:, c]
        rows = np.flatnonzero(below) + r + 1
        if rows.size:
            R[rows, c:] = (R[rows, c:] - np.outer(R[rows, c], R[r, c:])) % p
        r += 1
    return r


def nullspace_modp(M, p: int) -> np.ndarray:
    """Columns form a basis of {x : M x = 0} over F_p (shape n x nullity)."""
    M = np.asarray(M, dtype=np.int64)
    n = M.shape[1]
    if M.shape[0] == 0:
        return np.eye(n, dtype=np.int64)
    R, pivots = rref_modp(M, p)
    free = [c for c in range(n) if c not in set(pivots)]
    basis = np.zeros((n, len(free)), dtype=np.int64)
    for j, f in enumerate(free):
        basis[f, j] = 1
        for r, c in enumerate(pivots):
            basis[c, j] = (-R[r, f]) % p
    return basis


def inverse_modp(M, p: int) -> np.ndarray:
    M = np.asarray(M, dtype=np.int64) % p
    n = M.shape[0]
    R, pivots = rref_modp(np.hstack([M, np.eye(n, dtype=np.int64)]), p)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return R[:, n:]


# ---------------------------------------------------------------- F_p, large

class _NoPivot(Exception):
    pass


_BASE = 16


def _fmod(x, p):
    """x mod p for float64 arrays holding integers below 2**53.

    floor(x / p) can be off by one after rounding; the two masked fixes
    bring the residue back into [0, p).
    """
    x = np.asarray(x, dtype=np.float64)
    r = x - np.floor(x * (1.0 / p)) * p
    r[r < 0] += p
    r[r >= p] -= p
    return r


def _loose(x, p):
    """Cheap reduction into [-p, 2p); enough to keep later products exact."""
    return x - np.floor(x * (1.0 / p)) * p


def _lu_base(F, c0, c1, p, perm):
    # work on a transposed contiguous copy of the panel, then replay the swaps
    P = np.ascontiguousarray(F[c0:, c0:c1].T)
    width = c1 - c0
    swaps = []
    for j in range(width):
        col = _fmod(P[j, j:], p)
        nz = np.flatnonzero(col)
        if nz.size == 0:
            raise _NoPivot(c0 + j)
        i = int(nz[0])
        if i:
            P[:, [j, j + i]] = P[:, [j + i, j]]
            col[[0, i]] = col[[i, 0]]
            swaps.append((c0 + j, c0 + j + i))
        inv = pow(int(col[0]), -1, p)
        mult = _loose(col[1:] * inv, p)
        P[j, j] = col[0]
        P[j, j + 1:] = mult
        if j + 1 < width:
            row = _loose(P[j + 1:, j], p)
            P[j + 1:, j] = row
            P[j + 1:, j + 1:] -= np.outer(row, mult)
    for a, b in swaps:
        F[[a, b], :c0] = F[[b, a], :c0]
        F[[a, b], c1:] = F[[b, a], c1:]
        perm[[a, b]] = perm[[b, a]]
    F[c0:, c0:c1] = P.T


def _lu_panel(F, c0, c1, p, perm):
    """Recursive LU with partial row pivoting on columns [c0, c1) of F.

    Swaps whole rows of F so the L factor to the left follows the pivoting.
    Raises _NoPivot when a column has no nonzero candidate.

    Trailing entries are reduced lazily: a column is reduced when it becomes
    the pivot column and a U row when it is used.  Each entry absorbs at most
    n products below p**2 in between, so |F| < p + n p**2 stays exact.
    """
    width = c1 - c0
    if width <= _BASE:
        _lu_base(F, c0, c1, p, perm)
        return
    h = c0 + width // 2
    _lu_panel(F, c0, h, p, perm)
    F[c0:h, h:c1] = _solve_unit_lower(F[c0:h, c0:h], _loose(F[c0:h, h:c1], p), p)
    F[h:, h:c1] -= F[h:, c0:h] @ F[c0:h, h:c1]
    _lu_panel(F, h, c1, p, perm)


def _solve_unit_lower(L, B, p):
    """X with L X = B, L unit lower triangular (float64 residues)."""
    k = L.shape[0]
    if k <= _BASE:
        # invert the small block first; one matmul then handles all of B
        X = np.eye(k)
        for i in range(1, k):
            X[i] = _loose(X[i] - L[i, :i] @ X[:i], p)
        return _loose(X @ B, p)
    h = k // 2
    X1 = _solve_unit_lower(L[:h, :h], B[:h], p)
    B2 = _loose(B[h:] - L[h:, :h] @ X1, p)
    X2 = _solve_unit_lower(L[h:, h:], B2, p)
    return np.vstack([X1, X2])


def _solve_unit_upper(U, B, p):
    """X with U X = B, U unit upper triangular (float64 residues)."""
    k = U.shape[0]
    if k <= _BASE:
        X = np.eye(k)
        for i in range(k - 2, -1, -1):
            X[i] = _loose(X[i] - U[i, i + 1:] @ X[i + 1:], p)
        return _loose(X @ B, p)
    h = k // 2
    X2 = _solve_unit_upper(U[h:, h:], B[h:], p)
    B1 = _loose(B[:h] - U[:h, h:] @ X2, p)
    X1 = _solve_unit_upper(U[:h, :h], B1, p)
    return np.vstack([X1, X2])


def wide_kernel_modp(M, p: int) -> np.ndarray | None:
    """Kernel basis (n x (n - m)) of a full-row-rank m x n matrix, m <= n.

    Returns None when M turns out not to have full row rank.  Uses the BLAS
    LU above on M^T; use it for large generic matrices where rref_modp
    would be too slow.
    """
    M = np.asarray(M)
    m, n = M.shape
    if m > n:
        return None
    if p * p * max(m, 1) >= _EXACT:
        raise ValueError("prime too large for float64 exact LU at this size")
    M = M.astype(np.int64, copy=False)
    if m and n and (M.min() < 0 or M.max() >= p):
        M = M % p
    F = np.array(M.T, dtype=np.float64)
    perm = np.arange(n)
    try:
        if m:
            _lu_panel(F, 0, m, p, perm)
    except _NoPivot:
        return None
    d = n - m
    L1 = F[:m, :m]
    L2 = F[m:, :m]
    # kernel vectors z (permuted) satisfy z^T L = 0: z = [-(L2 L1^{-1})^T ; I]
    if m:
        Y = _solve_unit_upper(np.ascontiguousarray(L1.T), np.ascontiguousarray(L2.T), p)
    else:
        Y = np.zeros((0, d))
    Z = np.vstack([_fmod(-Y, p), np.eye(d)])
    K = np.empty_like(Z)
    K[perm] = Z
    return K.astype(np.int64)


# ---------------------------------------------------------------- Q

def _integer_rows(M) -> list[list[int]]:
    """Scale each row by the lcm of its denominators (row space unchanged)."""
    rows = []
    for row in M:
        row = [Fraction(x) for x in row]
        den = 1
        for x in row:
            den = den * x.denominator // math.gcd(den, x.denominator)
        rows.append([int(x * den) for x in row])
    return rows


def bareiss_echelon(M) -> tuple[list[list[int]], list[int]]:
    """Fraction-free row echelon form of a rational matrix.

    Returns integer rows (only the first len(pivots) are nonzero) and pivot
    columns.  Every division in the Bareiss update is exact.
    """
    A = _integer_rows(M)
    m = len(A)
    n = len(A[0]) if m else 0
    pivots: list[int] = []
    prev = 1
    r = 0
    for c in range(n):
        if r == m:
            break
        piv = next((i for i in range(r, m) if A[i][c] != 0), None)
        if piv is None:
            continue
        if piv != r:
            A[r], A[piv] = A[piv], A[r]
        pr = A[r]
        a = pr[c]
        for i in range(r + 1, m):
            row = A[i]
            b = row[c]
            if b == 0:
                if a != prev:
                    A[i] = [x * a // prev for x in row]
                continue
            A[i] = [(a * row[j] - b * pr[j]) // prev if j >= c else 0 for j in range(n)]
        prev = a
        pivots.append(c)
        r += 1
    return A, pivots


def rank_q(M) -> int:
    M = list(M)
    if not M or not len(M[0]):
        return 0
    return len(bareiss_echelon(M)[1])


def nullspace_q(M, ncols: int | None = None) -> list[list[Fraction]]:
    """Basis vectors (each a list of Fractions) of the rational nullspace."""
    M = [list(row) for row in M]
    n = ncols if ncols is not None else (len(M[0]) if M else 0)
    if not M:
        return [[Fraction(int(i == j)) for i in range(n)] for j in range(n)]
    A, pivots = bareiss_echelon(M)
    pivset = set(pivots)
    free = [c for c in range(n) if c not in pivset]
    basis = []
    for f in free:
        x = [Fraction(0)] * n
        x[f] = Fraction(1)
        for r in range(len(pivots) - 1, -1, -1):
            c = pivots[r]
            row = A[r]
            acc = sum((row[j] * x[j] for j in range(c + 1, n) if row[j]), Fraction(0))
            x[c] = -acc / row[c]
        basis.append(x)
    return basis
