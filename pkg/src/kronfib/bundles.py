"""Bundle-level bookkeeping for cokernels of E^s -> F^t.

Nothing here touches matrices: given a pair (E, F) described by ranks,
first Chern classes and w = dim Hom(E, F), the functions below answer the
numerical questions (simplicity, decomposition type, stability where it is
known, slopes, splitting on a line) with exact integer and Fraction
arithmetic.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

from .decomp import Decomposition, decompose
from .sequence import Shape, as_shape, fib_value, tits_form

PRESET_KINDS = ("steiner", "omega_target", "omega_source", "p2_symq")


@dataclass(frozen=True)
class PresetFlags:
    basic: bool
    R: bool


@dataclass(frozen=True)
class PairPreset:
    name: str
    params: tuple[tuple[str, int], ...]
    N: int
    rkE: int
    rkF: int
    w: int
    flags: PresetFlags
    c1E: int | None = None
    c1F: int | None = None

    def param(self, key: str) -> int:
        return dict(self.params)[key]

    def label(self) -> str:
        inner = ",".join(f"{k}={v}" for k, v in self.params)
        return f"{self.name}({inner})"


def p2_symq_w(p: int, r: int, d: int) -> int:
    """dim Hom(S^pQ, S^rQ(d)) on P^2 from the splitting of S^pQ x S^rQ.

    Each summand S^jQ(e) with j = p+r-2i, e = d-p+i contributes
    (j+1)(e+1)(j+e+2)/2 sections.
    """
    total = 0
    for i in range(min(p, r) + 1):
        j, e = p + r - 2 * i, d - p + i
        total += (e + 1) * (j + 1) * (e + j + 2) // 2
    return total


def _need(cond: bool, msg: str) -> None:
    if not cond:
        raise ValueError(msg)


def make_preset(name: str, **params: int) -> PairPreset:
    """Build one of the four preset pairs.

    steiner(N, d): E = O, F = O(d) on P^N.
    omega_target(N, p): E = O(-1), F = Omega^p(p).
    omega_source(N, p): E = Omega^p(p), F = O.
    p2_symq(p, r, d): E = S^pQ, F = S^rQ(d) on P^2.
    """
    for k, v in params.items():
        if not isinstance(v, int) or isinstance(v, bool):
            raise TypeError(f"{k} must be an int")
    if name == "steiner":
        N, d = params["N"], params["d"]
        _need(N >= 2, f"N must be >= 2, got {N}")
        _need(d >= 1, f"d must be >= 1, got {d}")
        R = N >= 3 or d <= 2
        return PairPreset(name, (("N", N), ("d", d)), N, 1, 1, comb(N + d, d),
                          PresetFlags(True, R), c1E=0, c1F=d)
    if name in ("omega_target", "omega_source"):
        N, p = params["N"], params["p"]
        _need(N >= 2, f"N must be >= 2, got {N}")
        _need(0 < p < N, f"need 0 < p < N, got p={p}, N={N}")
        rk = comb(N, p)
        if name == "omega_target":
            return PairPreset(name, (("N", N), ("p", p)), N, 1, rk, comb(N + 1, N - p),
                              PresetFlags(True, True))
        return PairPreset(name, (("N", N), ("p", p)), N, rk, 1, comb(N + 1, p),
                          PresetFlags(True, True))
    if name == "p2_symq":
        p, r, d = params["p"], params["r"], params["d"]
        _need(p >= 1 and r >= 1, f"need p, r >= 1, got p={p}, r={r}")
        _need(d > p + 1, f"need d > p + 1, got d={d}, p={p}")
        return PairPreset(name, (("p", p), ("r", r), ("d", d)), 2, p + 1, r + 1,
                          p2_symq_w(p, r, d), PresetFlags(True, False))
    raise ValueError(f"unknown preset {name!r}; expected one of {', '.join(PRESET_KINDS)}")


# ---------------------------------------------------------------- classify

class Verdict(str, enum.Enum):
    STABLE = "stable"
    STRICTLY_SEMISTABLE = "strictly-semistable"
    UNSTABLE = "unstable"
    NOT_APPLICABLE = "not-applicable"


@dataclass(frozen=True)
class Classification:
    preset: PairPreset
    shape: Shape
    q: int
    admissible: bool
    simple: bool
    decomposition: Decomposition | None
    verdict: Verdict
    exceptional_stable: bool = False
    notes: tuple[str, ...] = field(default=())


def fibonacci_index(w: int, shape) -> int | None:
    """k with shape == (a_{k-1}, a_k), or None."""
    s, t = as_shape(shape)
    k = 1
    while fib_value(w, k - 1) <= s:
        if (fib_value(w, k - 1), fib_value(w, k)) == (s, t):
            return k
        k += 1
    return None


def classify(preset: PairPreset, shape) -> Classification:
    shape = as_shape(shape)
    s, t = shape
    w = preset.w
    q = tits_form(w, shape)
    admissible = t * preset.rkF - s * preset.rkE >= preset.N
    notes = []
    dec = None
    if q >= 1:
        if t >= s:
            dec = decompose(w, shape)
        else:
            notes.append("no decomposition for s > t")
    if not preset.flags.R:
        notes.append("pair does not satisfy (R); results are numerical only")

    verdict = Verdict.NOT_APPLICABLE
    if preset.name == "steiner" and preset.N == 2 and preset.param("d") in (1, 2):
        if q <= 1:
            verdict = Verdict.STABLE
        elif dec is not None and dec.m == 0 and dec.n > 1:
            verdict = Verdict.STRICTLY_SEMISTABLE
        else:
            verdict = Verdict.UNSTABLE

    exceptional = (preset.name == "steiner" and preset.param("d") == 1
                   and fibonacci_index(w, shape) is not None)
    return Classification(preset, shape, q, admissible, q <= 1, dec, verdict,
                          exceptional, tuple(notes))


def cokernel_hom_dims(preset: PairPreset, shape) -> tuple[int, int]:
    """(dim Hom(F, C), dim Hom(E, C)) = (t, w t - s).

    Read off the resolution; it needs the vanishing that comes with (R), so
    for presets without the R flag the numbers are formula values only.
    """
    s, t = as_shape(shape)
    return t, preset.w * t - s


# ---------------------------------------------------------------- Steiner slopes

def _steiner_terms(N: int, n: int):
    if N < 2:
        raise ValueError(f"N must be >= 2, got {N}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    w = N + 1
    a = [fib_value(w, k) for k in range(n + 2)]
    r = [None] + [a[k] - a[k - 1] for k in range(1, n + 2)]
    return a, r


def steiner_slope(N: int, n: int) -> Fraction:
    """Slope a_n / (a_n - a_{n-1}) of the n-th exceptional Steiner bundle (w = N + 1)."""
    a, r = _steiner_terms(N, n)
    return Fraction(a[n], r[n])


@dataclass(frozen=True)
class StabilityStep:
    N: int
    n: int
    cap: int
    slope: Fraction
    next_slope: Fraction
    hits: tuple[tuple[int, int], ...]
    violations: tuple[tuple[int, int], ...]
    gap: Fraction
    gap_ok: bool

    @property
    def ok(self) -> bool:
        return not self.violations and self.gap_ok


def verify_stability_step(N: int, n: int, cap: int) -> StabilityStep:
    """Scan every (c, r) with 1 <= r < r_{n+1}, |c| <= cap, and slope c/r in
    [a_n/r_n, a_{n+1}/r_{n+1}].  A quotient slope strictly inside that window
    would break the induction; every hit must sit exactly on a_n/r_n.
    """
    if cap < 0:
        raise ValueError("cap must be >= 0")
    a, r = _steiner_terms(N, n)
    lo_num, lo_den = a[n], r[n]
    hi_num, hi_den = a[n + 1], r[n + 1]
    hits, bad = [], []
    for rr in range(1, hi_den):
        c_lo = -(-lo_num * rr // lo_den)
        c_hi = hi_num * rr // hi_den
        for c in range(max(c_lo, -cap), min(c_hi, cap) + 1):
            hits.append((c, rr))
            if lo_den * c != lo_num * rr:
                bad.append((c, rr))
    gap = Fraction(hi_num, hi_den) - Fraction(lo_num, lo_den)
    gap_ok = hi_num * lo_den - lo_num * hi_den == 1
    return StabilityStep(N, n, cap, Fraction(lo_num, lo_den), Fraction(hi_num, hi_den),
                         tuple(hits), tuple(bad), gap, gap_ok)


# ---------------------------------------------------------------- lines, ranges

@dataclass(frozen=True)
class SplittingType:
    a: int
    n: int
    m: int

    def label(self) -> str:
        parts = [f"O({self.a})^{self.n}"] if self.n else []
        if self.m:
            parts.append(f"O({self.a + 1})^{self.m}")
        return " + ".join(parts)


def splitting_type_p1(d: int, shape) -> SplittingType:
    """Balanced splitting O(a)^n + O(a+1)^m of rank t - s and degree d t."""
    s, t = as_shape(shape)
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    if t <= s:
        raise ValueError(f"need t > s, got ({s}, {t})")
    rank, deg = t - s, d * t
    a, m = divmod(deg, rank)
    return SplittingType(a, rank - m, m)


def exceptional_range(N: int, d: int) -> bool:
    if N < 2 or d < 1:
        raise ValueError(f"need N >= 2 and d >= 1, got N={N}, d={d}")
    return d <= N


def exceptional_defect(N: int, d: int, k: int) -> int:
    """dim Ext^{N-1}(C_k, C_k) = a_k a_{k-1} h^N(O(-d)), with w = binom(N+d, d)."""
    exceptional_range(N, d)
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    w = comb(N + d, d)
    return fib_value(w, k) * fib_value(w, k - 1) * comb(d - 1, N)


@dataclass(frozen=True)
class BeilinsonCheck:
    N: int
    k: int
    rank_lhs: int
    rank_rhs: int
    c1_lhs: int
    c1_rhs: int

    @property
    def ok(self) -> bool:
        return self.rank_lhs == self.rank_rhs and self.c1_lhs == self.c1_rhs


def beilinson_consistency(N: int, k: int) -> BeilinsonCheck:
    """Compare rank and c1 of the two resolutions of C_k with w = N + 1.

    The Steiner side O^{a_{k-1}} -> O(1)^{a_k} shifted by one index against
    the Omega side gives a_{k+1} - a_k = N a_k - a_{k-1} for ranks and
    2 a_k - a_{k+1} = (1 - N) a_k + a_{k-1} for c1, using
    c1(Omega^{N-1}(N-1)) = 1 - N.  Both reduce to the recurrence.
    """
    if N < 2 or k < 1:
        raise ValueError(f"need N >= 2 and k >= 1, got N={N}, k={k}")
    w = N + 1
    a0, a1, a2 = fib_value(w, k - 1), fib_value(w, k), fib_value(w, k + 1)
    return BeilinsonCheck(N, k, a2 - a1, N * a1 - a0, 2 * a1 - a2, a1 * (1 - N) + a0)


def syzygy_stable(d: int, t: int) -> bool:
    """Stability of the generic O -> O(d)^t cokernel on P^2 (s = 1)."""
    if d not in (1, 2):
        raise ValueError(f"stability is only known for d in (1, 2), got {d}")
    if t < 1:
        raise ValueError(f"t must be >= 1, got {t}")
    return t <= 3 * d


def hein_bound(d: int) -> Fraction:
    return Fraction(4 * d, 5) + 1
