"""Canonical decomposition of a shape (s, t) into Fibonacci blocks.

A shape with q(s, t) >= 1 and t >= s is written uniquely as

    s = n a_{k-1} + m a_k,    t = n a_k + m a_{k+1}

with n >= 1, m >= 0.  Shapes sitting exactly on a ratio a_k/a_{k-1} come out
with m = 0, so each shape has a single representative.
"""

from __future__ import annotations

from dataclasses import dataclass

from .sequence import Ratio, Shape, _check_w, as_shape, fib_value, ratio_compare, tits_form


@dataclass(frozen=True)
class Decomposition:
    w: int
    k: int
    n: int
    m: int

    def shape(self) -> Shape:
        return compose(self.w, self.k, self.n, self.m)

    def end_dim(self) -> int:
        """n^2 + m^2 + n m w: the endomorphism count of B_k^n + B_{k+1}^m."""
        return self.n * self.n + self.m * self.m + self.n * self.m * self.w

    def label(self) -> str:
        parts = [f"C_{self.k}^{self.n}"]
        if self.m:
            parts.append(f"C_{self.k + 1}^{self.m}")
        return " + ".join(parts)


@dataclass(frozen=True)
class FibShapeChain:
    w: int
    shapes: tuple[Shape, ...]


def shape_of_fibonacci(w: int, k: int) -> Shape:
    """(a_{k-1}, a_k), the shape of the k-th Fibonacci block."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return Shape(fib_value(w, k - 1), fib_value(w, k))


def fibonacci_chain(w: int, K: int) -> FibShapeChain:
    return FibShapeChain(w, tuple(shape_of_fibonacci(w, k) for k in range(1, K + 1)))


def mutate_shape(w: int, shape) -> Shape:
    """(s, t) -> (t, w t - s)."""
    _check_w(w)
    s, t = as_shape(shape)
    if w * t < s:
        raise ValueError(f"cannot mutate ({s}, {t}): w*t < s")
    return Shape(t, w * t - s)


def compose(w: int, k: int, n: int, m: int) -> Shape:
    _check_w(w)
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if n < 0 or m < 0 or n + m < 1:
        raise ValueError(f"need n, m >= 0 and n + m >= 1, got n={n}, m={m}")
    a0, a1, a2 = fib_value(w, k - 1), fib_value(w, k), fib_value(w, k + 1)
    return Shape(n * a0 + m * a1, n * a1 + m * a2)


def decompose(w: int, shape) -> Decomposition:
    _check_w(w)
    shape = as_shape(shape)
    s, t = shape
    if s > t:
        raise ValueError(f"decompose needs t >= s, got ({s}, {t})")
    q = tits_form(w, shape)
    if q < 1:
        raise ValueError(f"q({s}, {t}) = {q} < 1: shape is in the simple regime")
    if s == 0:
        return Decomposition(w, 1, t, 0)
    # first k with a_{k+1}/a_k < t/s; then t/s <= a_k/a_{k-1} holds automatically
    k = 1
    while ratio_compare(w, k + 1, shape) is not Ratio.ABOVE:
        k += 1
    a0, a1, a2 = fib_value(w, k - 1), fib_value(w, k), fib_value(w, k + 1)
    n = a1 * t - a2 * s
    m = a1 * s - a0 * t
    if n == 0:
        # not reachable with the strict window above; kept for the orientation contract
        k, n, m = k + 1, m, 0
    assert n > 0 and m >= 0, (w, shape, k, n, m)
    return Decomposition(w, k, n, m)
