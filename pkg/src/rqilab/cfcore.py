"""Inverse branches of the Gauss map as integer 2x2 matrices.

The branch ``h_m : x -> 1/(m + x)`` is the matrix ``[[0, 1], [1, m]]`` and a
word ``(m_1, ..., m_p)`` is the product ``h_{m_1} ... h_{m_p}``.  Entries are
Python integers checked against the signed 128-bit range.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Optional, Sequence, Tuple

from .costs import CostSpec, PHI

INT128_MAX = (1 << 127) - 1
# distortion bound: rho = c x_h + d lies in (d, c + d] and c <= d
SIZE_BRACKET = (0.5, 1.0)


class ArithmeticOverflowError(OverflowError):
    """A matrix entry left the signed 128-bit range."""


def _check(v: int) -> int:
    if v > INT128_MAX or v < -INT128_MAX - 1:
        raise ArithmeticOverflowError(
            "LFT entry exceeds 128 bits; shrink N or the period")
    return v


@dataclass(frozen=True)
class Lft:
    """``x -> (a x + b) / (c x + d)``."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        for v in (self.a, self.b, self.c, self.d):
            _check(v)
        if self.det not in (1, -1):
            raise ValueError(f"determinant {self.det} is not +-1")

    @property
    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    @property
    def trace(self) -> int:
        return self.a + self.d

    def as_tuple(self) -> Tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    def __call__(self, x):
        return (self.a * x + self.b) / (self.c * x + self.d)

    def derivative(self, x):
        return self.det / (self.c * x + self.d) ** 2

    def __matmul__(self, other: "Lft") -> "Lft":
        return lft_compose(self, other)


IDENTITY = Lft(1, 0, 0, 1)


def lft_of_digit(m: int) -> Lft:
    if m < 1:
        raise ValueError("digit must be >= 1")
    return Lft(0, 1, 1, m)


def lft_compose(g: Lft, h: Lft) -> Lft:
    """Matrix product ``g h``, i.e. the map ``g o h``."""
    return Lft(
        _check(g.a * h.a + g.b * h.c),
        _check(g.a * h.b + g.b * h.d),
        _check(g.c * h.a + g.d * h.c),
        _check(g.c * h.b + g.d * h.d),
    )


def _check_word(word: Sequence[int]) -> None:
    if len(word) == 0:
        raise ValueError("empty digit word")
    if any(int(m) < 1 for m in word):
        raise ValueError("digits must be >= 1")


def lft_of_word(word: Sequence[int]) -> Lft:
    _check_word(word)
    a, b, c, d = 1, 0, 0, 1
    for m in word:
        # right-multiply by [[0, 1], [1, m]]
        a, b = b, _check(a + m * b)
        c, d = d, _check(c + m * d)
    return Lft(a, b, c, d)


def spectral_radius(h: Lft) -> float:
    """Dominant eigenvalue ``(t + sqrt(t^2 - 4 det)) / 2`` of the matrix."""
    t = h.trace
    return (t + math.sqrt(t * t - 4 * h.det)) / 2.0


def fixed_point(h: Lft) -> float:
    """Attracting fixed point of ``h`` in (0, 1)."""
    disc = math.sqrt(h.trace ** 2 - 4 * h.det)
    diff = h.a - h.d
    if diff >= 0:
        return (diff + disc) / (2.0 * h.c)
    # conjugate form avoids cancellation when a < d
    return 2.0 * h.b / (disc - diff)


@dataclass(frozen=True)
class SizeTriple:
    alpha: float
    epsilon: float
    q: int
    r: int


def size_triple(word: Sequence[int]) -> SizeTriple:
    h = lft_of_word(word)
    rho = spectral_radius(h)
    alpha = 1.0 / rho
    r = 1 if len(word) % 2 == 0 else 2
    q = h.d
    lo, hi = SIZE_BRACKET
    if not (lo * rho <= q <= hi * rho * (1 + 1e-15)):
        raise AssertionError(f"size bracket violated for {tuple(word)}")
    return SizeTriple(alpha=alpha, epsilon=rho ** r, q=q, r=r)


def epsilon_trace(word: Sequence[int]) -> int:
    """Integer ``T`` with ``epsilon + 1/epsilon = T`` (epsilon is a unit of norm 1)."""
    h = lft_of_word(word)
    t = h.trace
    return t if len(word) % 2 == 0 else t * t + 2


def cost_eval(cost: CostSpec, word: Sequence[int]) -> float:
    _check_word(word)
    return float(sum(cost(int(m)) for m in word))


def gauss_map(x) -> Optional[Tuple[int, object]]:
    """One step ``x -> (floor(1/x), 1/x - floor(1/x))``; ``None`` at ``x = 0``.

    Rational inputs (``Fraction``) are handled exactly.
    """
    if x == 0:
        return None
    if not 0 < x < 1:
        raise ValueError("gauss_map needs x in [0, 1)")
    if isinstance(x, Rational):
        inv = 1 / Fraction(x)
        m = math.floor(inv)
        return m, inv - m
    inv = 1.0 / x
    m = int(math.floor(inv))
    return m, inv - m


def golden_alpha(k: int) -> float:
    """``alpha`` of the all-ones word of length ``k``."""
    return PHI ** -k
