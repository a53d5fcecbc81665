"""Generalized Fibonacci numbers a_{w,k} and the quadratic form q(s, t).

The sequence is defined by a_0 = 0, a_1 = 1, a_{k+1} = w a_k - a_{k-1} for a
fixed integer w >= 3.  Everything here is exact integer arithmetic; ratios are
compared by cross-multiplication and never converted to floats.
"""

from __future__ import annotations

import enum
import math
import threading
from dataclasses import dataclass


@dataclass(frozen=True)
class Shape:
    """Multiplicities (s, t) of a resolution E^s -> F^t, i.e. a t x s matrix shape."""

    s: int
    t: int

    def __post_init__(self):
        if self.s < 0 or self.t < 0:
            raise ValueError(f"negative shape ({self.s}, {self.t})")
        if self.s == 0 and self.t == 0:
            raise ValueError("shape (0, 0) is not allowed")

    def __iter__(self):
        yield self.s
        yield self.t

    def __add__(self, other: "Shape") -> "Shape":
        return Shape(self.s + other.s, self.t + other.t)

    def __repr__(self):
        return f"Shape({self.s}, {self.t})"


def as_shape(shape) -> Shape:
    if isinstance(shape, Shape):
        return shape
    s, t = shape
    return Shape(int(s), int(t))


def _check_w(w: int) -> None:
    if not isinstance(w, int) or isinstance(w, bool):
        raise TypeError(f"w must be an int, got {type(w).__name__}")
    if w < 3:
        raise ValueError(f"w must be >= 3, got {w}")


_cache: dict[int, list[int]] = {}
_cache_lock = threading.Lock()


def fib_value(w: int, k: int) -> int:
    """Return a_{w,k}, extending a per-w cache as needed."""
    _check_w(w)
    if k < 0:
        raise ValueError(f"index must be >= 0, got {k}")
    terms = _cache.get(w)
    if terms is None or len(terms) <= k:
        with _cache_lock:
            terms = _cache.setdefault(w, [0, 1])
            while len(terms) <= k:
                terms.append(w * terms[-1] - terms[-2])
    return terms[k]


@dataclass(frozen=True)
class FibTable:
    w: int
    values: tuple[int, ...]

    def __getitem__(self, k: int) -> int:
        return self.values[k]

    def __len__(self):
        return len(self.values)


def fib_table(w: int, K: int) -> FibTable:
    """a_{w,0}, ..., a_{w,K} as a FibTable."""
    _check_w(w)
    if K < 0:
        raise ValueError(f"K must be >= 0, got {K}")
    fib_value(w, K)
    return FibTable(w, tuple(_cache[w][: K + 1]))


def tits_form(w: int, shape) -> int:
    s, t = shape
    return s * s + t * t - w * s * t


class Ratio(str, enum.Enum):
    BELOW = "below"
    EQUAL = "equal"
    ABOVE = "above"


def ratio_compare(w: int, k: int, shape) -> Ratio:
    """Compare t/s with a_k/a_{k-1}; s = 0 counts as +infinity.

    For k = 1 the reference ratio a_1/a_0 is itself infinite, so (0, t) is
    EQUAL there and every shape with s > 0 is BELOW.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    s, t = shape
    if s == 0:
        return Ratio.EQUAL if k == 1 else Ratio.ABOVE
    lhs = t * fib_value(w, k - 1)
    rhs = s * fib_value(w, k)
    if lhs < rhs:
        return Ratio.BELOW
    if lhs > rhs:
        return Ratio.ABOVE
    return Ratio.EQUAL


@dataclass(frozen=True)
class PellSolutionList:
    w: int
    bound: int
    solutions: tuple[Shape, ...]


def pell_solutions(w: int, bound: int) -> PellSolutionList:
    """All (s, t) with 0 <= s <= t <= bound and s^2 + t^2 - w s t = 1.

    For each s the equation is a quadratic in t with discriminant
    (w^2 - 4) s^2 + 4, so scanning s and testing that discriminant for a
    perfect square finds every solution in the box.
    """
    _check_w(w)
    if bound < 0:
        raise ValueError(f"bound must be >= 0, got {bound}")
    found = []
    d2 = w * w - 4
    for s in range(bound + 1):
        disc = d2 * s * s + 4
        root = math.isqrt(disc)
        if root * root != disc:
            continue
        for num in (w * s - root, w * s + root):
            if num % 2:
                continue
            t = num // 2
            if s <= t <= bound and tits_form(w, (s, t)) == 1:
                found.append(Shape(s, t))
    found = sorted(set(found), key=lambda sh: (sh.s, sh.t))
    return PellSolutionList(w, bound, tuple(found))
