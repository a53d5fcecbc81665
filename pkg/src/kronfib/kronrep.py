"""Representations of the w-arrow Kronecker quiver as w-tuples of t x s matrices.

A representation X = (M_1, ..., M_w) with M_i : F^s -> F^t.  A morphism
X -> Y is a pair (A, B), A : F^{s_X} -> F^{s_Y}, B : F^{t_X} -> F^{t_Y}, with
N_i A = B M_i for every i, where N_i are the slices of Y.  Hom is the kernel
of Phi(A, B) = (N_i A - B M_i)_i and Ext^1 its cokernel.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import linalg
from .decomp import compose
from .linalg import FieldSpec
from .sequence import Shape, _check_w, as_shape, fib_value

# Pairs whose direct intertwiner system has more unknowns than this are first
# shrunk by sink reflections (prime fields only).
REFLECT_ABOVE = 256

RATIONAL_RANGE = 2 ** 16

# Fibonacci blocks over F_p with more rows than this are sampled with a
# planted kernel (see planted_kernel_rep).
PLANT_ABOVE = 2048


class RepFormatError(ValueError):
    """A representation document is malformed."""


@dataclass(frozen=True, eq=False)
class KroneckerRep:
    w: int
    s: int
    t: int
    field: FieldSpec
    slices: tuple
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        _check_w(self.w)
        if len(self.slices) != self.w:
            raise ValueError(f"expected {self.w} slices, got {len(self.slices)}")
        for M in self.slices:
            if M.shape != (self.t, self.s):
                raise ValueError(f"slice shape {M.shape} != ({self.t}, {self.s})")
            M.flags.writeable = False

    @property
    def shape(self) -> Shape:
        return Shape(self.s, self.t)

    def same_data(self, other: "KroneckerRep") -> bool:
        return (self.w == other.w and self.shape == other.shape
                and self.field == other.field
                and all(np.array_equal(a, b) for a, b in zip(self.slices, other.slices)))

    def concatenated(self) -> np.ndarray:
        """[M_1 | ... | M_w], the t x ws matrix of the summed map F^{ws} -> F^t."""
        return np.hstack(self.slices) if self.s else np.zeros((self.t, 0), dtype=self.slices[0].dtype)


def _rng(*key):
    return np.random.default_rng([int(k) & 0xFFFFFFFFFFFFFFFF for k in key])


def _empty(field: FieldSpec, rows: int, cols: int) -> np.ndarray:
    if field.is_prime_field:
        return np.zeros((rows, cols), dtype=np.int64)
    out = np.empty((rows, cols), dtype=object)
    out[...] = Fraction(0)
    return out


def _sample(field: FieldSpec, rng, rows: int, cols: int) -> np.ndarray:
    if field.is_prime_field:
        return rng.integers(0, field.p, size=(rows, cols), dtype=np.int64)
    ints = rng.integers(-RATIONAL_RANGE, RATIONAL_RANGE + 1, size=(rows, cols))
    out = np.empty((rows, cols), dtype=object)
    for idx, v in np.ndenumerate(ints):
        out[idx] = Fraction(int(v))
    return out


def from_slices(w: int, slices, field: FieldSpec = FieldSpec()) -> KroneckerRep:
    mats = []
    for M in slices:
        if field.is_prime_field:
            A = np.array(M, dtype=np.int64) % field.p
        else:
            A = np.array(M, dtype=object)
            if A.ndim == 2:
                A = np.vectorize(Fraction, otypes=[object])(A) if A.size else A
        mats.append(A)
    t, s = mats[0].shape
    return KroneckerRep(w, s, t, field, tuple(mats))


def random_rep(w: int, shape, field: FieldSpec = FieldSpec(), seed: int = 0) -> KroneckerRep:
    """Uniform slices over F_p, or integer entries in +-2**16 over Q."""
    _check_w(w)
    s, t = as_shape(shape)
    rng = _rng(seed, 0x5EED)
    slices = tuple(_sample(field, rng, t, s) for _ in range(w))
    return KroneckerRep(w, s, t, field, slices)


def zero_rep(w: int, shape, field: FieldSpec = FieldSpec()) -> KroneckerRep:
    s, t = as_shape(shape)
    return KroneckerRep(w, s, t, field, tuple(_empty(field, t, s) for _ in range(w)))


def direct_sum(X: KroneckerRep, Y: KroneckerRep) -> KroneckerRep:
    if X.w != Y.w:
        raise ValueError(f"w mismatch: {X.w} vs {Y.w}")
    if X.field != Y.field:
        raise ValueError(f"field mismatch: {X.field} vs {Y.field}")
    s, t = X.s + Y.s, X.t + Y.t
    slices = []
    for M, N in zip(X.slices, Y.slices):
        Z = _empty(X.field, t, s)
        Z[:X.t, :X.s] = M
        Z[X.t:, X.s:] = N
        slices.append(Z)
    return KroneckerRep(X.w, s, t, X.field, tuple(slices))


def fibonacci_block(w: int, k: int, field: FieldSpec = FieldSpec(), seed: int = 0) -> KroneckerRep:
    """A random representation of shape (a_{k-1}, a_k).

    Over F_p, blocks with more than PLANT_ABOVE rows come from
    planted_kernel_rep, so their sink reflection is known without elimination.
    """
    shape = (fib_value(w, k - 1), fib_value(w, k))
    if field.is_prime_field and shape[1] > PLANT_ABOVE and w * shape[0] > shape[1]:
        return planted_kernel_rep(w, shape, field, seed)
    return random_rep(w, shape, field, seed)


def planted_kernel_rep(w: int, shape, field: FieldSpec = FieldSpec(), seed: int = 0) -> KroneckerRep:
    """Random rep over F_p sampled together with the kernel of [M_1 | ... | M_w].

    With C = [M_1 | ... | M_w] split as [C1 | C2] (C1 square t x t), draw C1
    and Z uniformly and set C2 = C1 Z.  Conditioned on C1 invertible this is
    exactly the uniform distribution on full-row-rank C, and then ker C is
    spanned by [-Z; I].  C1 is singular with probability about 1/p; that case
    is not detected and the stored reflection would be too small.

    The sink reflection is cached on the result.  A Freivalds check confirms
    C [-Z; I] = 0 before it is stored.
    """
    _check_w(w)
    if not field.is_prime_field:
        raise NotImplementedError("planted sampling needs a prime field")
    s, t = as_shape(shape)
    d = w * s - t
    if d <= 0:
        raise ValueError(f"need w*s > t, got w={w}, shape=({s}, {t})")
    p = field.p
    if p * p * max(t, w * s) >= 2 ** 53:
        raise ValueError("prime too large for exact float64 products at this size")
    rng = _rng(seed, 0x91A7)
    C1 = rng.integers(0, p, size=(t, t), dtype=np.int64)
    Z = rng.integers(0, p, size=(t, d), dtype=np.int64)
    C1f = C1.astype(np.float64)
    C2f = (C1f @ Z.astype(np.float64)) % p
    K = np.vstack([(-Z) % p, np.eye(d, dtype=np.int64)])
    r = rng.integers(0, p, size=d).astype(np.float64)
    v = (K.astype(np.float64) @ r) % p
    if ((C1f @ v[:t] + C2f @ v[t:]) % p).any():
        raise AssertionError("planted kernel check failed")
    del C1f
    C = np.hstack([C1, C2f.astype(np.int64)])
    slices = tuple(np.ascontiguousarray(C[:, i * s:(i + 1) * s]) for i in range(w))
    X = KroneckerRep(w, s, t, field, slices)
    refl = tuple(np.ascontiguousarray(K[i * s:(i + 1) * s, :]) for i in range(w))
    X._cache["sink_reflection"] = KroneckerRep(w, d, s, field, refl)
    return X


def canonical_rep(w: int, k: int, n: int, m: int, field: FieldSpec = FieldSpec(),
                  seed: int = 0) -> KroneckerRep:
    """B_k^n + B_{k+1}^m, block diagonal, each block sampled from its own sub-seed.

    Block j (0-based, the n copies of B_k first) is fibonacci_block(...,
    seed=hash of (seed, j)).
    """
    compose(w, k, n, m)
    blocks = [fibonacci_block(w, k, field, _subseed(seed, j)) for j in range(n)]
    blocks += [fibonacci_block(w, k + 1, field, _subseed(seed, n + j)) for j in range(m)]
    out = blocks[0]
    for b in blocks[1:]:
        out = direct_sum(out, b)
    return out


def _subseed(seed: int, *key: int) -> int:
    ss = np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, *key])
    return int(ss.generate_state(2, dtype=np.uint32).astype(np.uint64) @ np.array([1, 2 ** 32], dtype=np.uint64))


# ---------------------------------------------------------------- Hom / Ext

def euler_form(w: int, shape_x, shape_y) -> int:
    sx, tx = shape_x
    sy, ty = shape_y
    return sx * sy + tx * ty - w * sx * ty


def _check_pair(X: KroneckerRep, Y: KroneckerRep) -> None:
    if X.w != Y.w:
        raise ValueError(f"w mismatch: {X.w} vs {Y.w}")
    if X.field != Y.field:
        raise ValueError(f"field mismatch: {X.field} vs {Y.field}")


def intertwiner_matrix(X: KroneckerRep, Y: KroneckerRep) -> np.ndarray:
    """Matrix of Phi(A, B) = (N_i A - B M_i)_i.

    Unknowns are vec(A) then vec(B), both row-major; equation (i, a, b) is
    entry (a, b) of the i-th t_Y x s_X block.  Rows are w*t_Y*s_X, columns
    s_Y*s_X + t_Y*t_X.
    """
    _check_pair(X, Y)
    sx, tx, sy, ty = X.s, X.t, Y.s, Y.t
    obj = not X.field.is_prime_field
    dtype = object if obj else np.int64
    n_a, n_b = sy * sx, ty * tx
    blocks = []
    eye_sx = np.eye(sx, dtype=np.int64).astype(dtype)
    eye_ty = np.eye(ty, dtype=np.int64).astype(dtype)
    for M, N in zip(X.slices, Y.slices):
        # (N A)[a,b] = sum_c N[a,c] A[c,b]   -> kron(N, I_sx)
        left = np.multiply.outer(N, eye_sx).transpose(0, 2, 1, 3).reshape(ty * sx, n_a)
        # (B M)[a,b] = sum_d B[a,d] M[d,b]   -> kron(I_ty, M^T)
        right = np.multiply.outer(eye_ty, M.T).transpose(0, 2, 1, 3).reshape(ty * sx, n_b)
        blocks.append(np.hstack([left, -right]))
    if not blocks or ty * sx == 0:
        return np.zeros((0, n_a + n_b), dtype=dtype)
    Phi = np.vstack(blocks)
    if not obj:
        Phi %= X.field.p
    return Phi


@dataclass(frozen=True)
class HomSpace:
    source_shape: Shape
    target_shape: Shape
    dim: int
    basis: tuple  # of (A, B) pairs

    def __len__(self):
        return self.dim


def _unvec(field: FieldSpec, v, sx, tx, sy, ty):
    n_a = sy * sx
    if field.is_prime_field:
        v = np.asarray(v, dtype=np.int64)
        return v[:n_a].reshape(sy, sx), v[n_a:].reshape(ty, tx)
    arr = np.empty(len(v), dtype=object)
    arr[:] = list(v)
    return arr[:n_a].reshape(sy, sx), arr[n_a:].reshape(ty, tx)


def _nullspace_vectors(X: KroneckerRep, Y: KroneckerRep):
    Phi = intertwiner_matrix(X, Y)
    n = Phi.shape[1]
    if X.field.is_prime_field:
        K = linalg.nullspace_modp(Phi, X.field.p)
        return [K[:, j] for j in range(K.shape[1])]
    return linalg.nullspace_q(Phi.tolist(), ncols=n)


def hom_space(X: KroneckerRep, Y: KroneckerRep) -> HomSpace:
    """Basis of all intertwiners X -> Y by direct elimination."""
    vecs = _nullspace_vectors(X, Y)
    basis = tuple(_unvec(X.field, v, X.s, X.t, Y.s, Y.t) for v in vecs)
    return HomSpace(X.shape, Y.shape, len(basis), basis)


def _phi_rank(X: KroneckerRep, Y: KroneckerRep) -> int:
    Phi = intertwiner_matrix(X, Y)
    if Phi.shape[0] == 0 or Phi.shape[1] == 0:
        return 0
    if X.field.is_prime_field:
        return linalg.rank_modp(Phi, X.field.p)
    return linalg.rank_q(Phi.tolist())


def sink_reflection(X: KroneckerRep) -> KroneckerRep | None:
    """Reflect at the sink: (F^s, F^t) becomes (ker[M_1..M_w], F^s).

    The new arrows are the w coordinate projections ker -> F^s, so the result
    has shape (ws - t, s).  Returns None unless [M_1 | ... | M_w] is onto
    F^t (equivalently X has no simple-projective summand), which is exactly
    when Hom and Ext^1 survive the reflection.  Prime fields only; cached on X.
    """
    if "sink_reflection" in X._cache:
        return X._cache["sink_reflection"]
    if not X.field.is_prime_field:
        raise NotImplementedError("sink reflection is implemented for prime fields")
    p = X.field.p
    out = None
    if X.s and X.w * X.s >= X.t:
        C = X.concatenated()
        K = None
        if X.t >= 64:
            K = linalg.wide_kernel_modp(C, p)
        if K is None:
            R, piv = linalg.rref_modp(C, p)
            if len(piv) == X.t:
                K = linalg.nullspace_modp(C, p)
        if K is not None:
            d = K.shape[1]
            slices = tuple(np.ascontiguousarray(K[i * X.s:(i + 1) * X.s, :]) for i in range(X.w))
            out = KroneckerRep(X.w, d, X.s, X.field, slices)
    X._cache["sink_reflection"] = out
    return out


def _reduce_pair(X, Y):
    while X.field.is_prime_field and X.s * Y.s + X.t * Y.t > REFLECT_ABOVE:
        dx, dy = X.w * X.s - X.t, X.w * Y.s - Y.t
        if dx < 0 or dy < 0 or dx * dy + X.s * Y.s >= X.s * Y.s + X.t * Y.t:
            break  # reflection would not shrink the system
        RX, RY = sink_reflection(X), sink_reflection(Y)
        if RX is None or RY is None:
            break
        X, Y = RX, RY
    return X, Y


def hom_ext(X: KroneckerRep, Y: KroneckerRep) -> tuple[int, int]:
    """(dim Hom(X, Y), dim Ext^1(X, Y)).

    Large pairs over F_p are first shrunk by simultaneous sink reflections
    (both must be onto at the sink); the final pair is solved directly, so
    hom and ext are each read off the rank of an explicit Phi.
    """
    _check_pair(X, Y)
    X, Y = _reduce_pair(X, Y)
    rank = _phi_rank(X, Y)
    unknowns = X.s * Y.s + X.t * Y.t
    equations = X.w * Y.t * X.s
    return unknowns - rank, equations - rank


def hom_dim(X, Y) -> int:
    return hom_ext(X, Y)[0]


def ext_dim(X, Y) -> int:
    return hom_ext(X, Y)[1]


def end_dim(X) -> int:
    """Dimension of the stabilizer Lie algebra {(A, B): M_i A = B M_i}."""
    return hom_dim(X, X)


def orbit_codim(X) -> int:
    """Codimension of the GL(s) x GL(t) orbit of X in the space of w-tuples."""
    return X.w * X.s * X.t - X.s * X.s - X.t * X.t + end_dim(X)


# ---------------------------------------------------------------- isomorphism

def _is_invertible(field: FieldSpec, M) -> bool:
    n, m = M.shape
    if n != m:
        return False
    if n == 0:
        return True
    if field.is_prime_field:
        return linalg.rank_modp(M, field.p) == n
    return linalg.rank_q(M.tolist()) == n


def is_isomorphic(X: KroneckerRep, Y: KroneckerRep, trials: int = 5, seed: int = 0) -> bool:
    """One-sided test: True is certain, False may be wrong.

    Draws `trials` random elements of Hom(X, Y) and reports True as soon as
    one has both components invertible.  If X and Y are isomorphic, a single
    draw fails with probability at most (s + t)/p over F_p (Schwartz-Zippel:
    det A det B has degree s + t in the coefficients).
    """
    _check_pair(X, Y)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if X.shape != Y.shape:
        return False
    if X.same_data(Y):
        return True
    H = hom_space(X, Y)
    if H.dim == 0:
        return False
    rng = _rng(seed, 0x150)
    for _ in range(trials):
        if X.field.is_prime_field:
            c = rng.integers(0, X.field.p, size=H.dim, dtype=np.int64)
            A = sum(int(ci) * Ab[0] for ci, Ab in zip(c, H.basis)) % X.field.p
            B = sum(int(ci) * Ab[1] for ci, Ab in zip(c, H.basis)) % X.field.p
        else:
            c = rng.integers(-RATIONAL_RANGE, RATIONAL_RANGE + 1, size=H.dim)
            A = sum(int(ci) * Ab[0] for ci, Ab in zip(c, H.basis))
            B = sum(int(ci) * Ab[1] for ci, Ab in zip(c, H.basis))
        if _is_invertible(X.field, np.asarray(A)) and _is_invertible(X.field, np.asarray(B)):
            return True
    return False


# ---------------------------------------------------------------- JSON

def _entry_str(field: FieldSpec, x) -> str:
    if field.is_prime_field:
        return str(int(x))
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def rep_to_json(X: KroneckerRep) -> str:
    doc = {
        "w": X.w,
        "s": X.s,
        "t": X.t,
        "field": X.field.to_json(),
        "slices": [[[_entry_str(X.field, x) for x in row] for row in M.tolist()] for M in X.slices],
    }
    return json.dumps(doc, separators=(",", ":"))


def _parse_entry(field: FieldSpec, text):
    if not isinstance(text, str):
        raise RepFormatError(f"entries must be decimal strings, got {text!r}")
    try:
        if field.is_prime_field:
            v = int(text)
            if not 0 <= v < field.p:
                raise RepFormatError(f"entry {text} outside [0, {field.p})")
            return v
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise RepFormatError(f"bad entry {text!r}: {exc}") from None


def _int_field(doc, key):
    v = doc.get(key)
    if not isinstance(v, int) or isinstance(v, bool) or v < 0:
        raise RepFormatError(f"{key!r} must be a nonnegative integer")
    return v


def rep_from_json(text: str) -> KroneckerRep:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise RepFormatError(f"not JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise RepFormatError("top level must be an object")
    w, s, t = (_int_field(doc, k) for k in ("w", "s", "t"))
    if w < 3:
        raise RepFormatError("w must be >= 3")
    if s == 0 and t == 0:
        raise RepFormatError("shape (0, 0) is not allowed")
    fdoc = doc.get("field")
    try:
        if fdoc == {"kind": "q"}:
            field = FieldSpec.rationals()
        elif isinstance(fdoc, dict) and fdoc.get("kind") == "fp" and set(fdoc) == {"kind", "p"}:
            field = FieldSpec.fp(fdoc["p"])
        else:
            raise RepFormatError(f"bad field {fdoc!r}")
    except (ValueError, TypeError) as exc:
        raise RepFormatError(str(exc)) from None
    slices = doc.get("slices")
    if not isinstance(slices, list) or len(slices) != w:
        raise RepFormatError(f"expected {w} slices")
    mats = []
    for M in slices:
        if not isinstance(M, list) or len(M) != t:
            raise RepFormatError(f"each slice needs {t} rows")
        out = _empty(field, t, s)
        for i, row in enumerate(M):
            if not isinstance(row, list) or len(row) != s:
                raise RepFormatError(f"each row needs {s} entries")
            for j, x in enumerate(row):
                out[i, j] = _parse_entry(field, x)
        mats.append(out)
    return KroneckerRep(w, s, t, field, tuple(mats))
