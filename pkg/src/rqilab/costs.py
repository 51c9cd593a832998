"""Digit costs of moderate growth.

A digit cost ``c`` maps a partial quotient ``m >= 1`` to a nonnegative real and
is extended additively along a period.  Every cost carries a growth pair
``(A, B)`` with ``c(m) <= A log m + B``; from it the exponent ``d`` follows.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Optional, Tuple

import numpy as np

PHI = (1.0 + math.sqrt(5.0)) / 2.0
# contraction ratio of the Gauss map inverse branches
RHO = PHI ** -2

KINDS = ("unit", "chi", "binlen", "custom")


class GrowthCertificateError(ValueError):
    """Raised when ``c(m) <= A log m + B`` fails; ``m`` is the first offender."""

    def __init__(self, cost: "CostSpec", m: int, value: float, bound: float):
        super().__init__(
            f"cost {cost.id} violates moderate growth at m={m}: "
            f"c(m)={value} > A log m + B = {bound}")
        self.m = m
        self.value = value
        self.bound = bound


@dataclass(frozen=True)
class GrowthCertificate:
    A: float
    B: float
    a: float
    b: float
    d: float
    m_max: int


@dataclass(frozen=True)
class CostSpec:
    """A digit cost.

    ``kind`` is one of ``unit``, ``chi`` (indicator of digit ``n``),
    ``binlen`` (binary length ``floor(log2 m) + 1``) or ``custom`` (explicit
    table ``c(1), c(2), ...``; digits past the table cost 0).
    """

    kind: str
    n: int = 0
    table: Tuple[float, ...] = field(default=())
    A: float = 0.0
    B: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown cost kind {self.kind!r}")
        if self.kind == "chi" and self.n < 1:
            raise ValueError("chi cost needs a digit n >= 1")
        if self.A < 0 or self.B < 0 or self.A + self.B <= 0:
            raise ValueError("growth pair needs A, B >= 0 and A + B > 0")
        if self.kind == "custom" and any(v < 0 for v in self.table):
            raise ValueError("digit costs must be nonnegative")

    @property
    def id(self) -> str:
        if self.kind == "chi":
            return f"chi{self.n}"
        return self.kind

    def __call__(self, m: int) -> float:
        if m < 1:
            raise ValueError("digits are positive integers")
        if self.kind == "unit":
            return 1.0
        if self.kind == "chi":
            return 1.0 if m == self.n else 0.0
        if self.kind == "binlen":
            return float(int(m).bit_length())
        if m <= len(self.table):
            return float(self.table[m - 1])
        return 0.0

    evaluate = __call__

    def values(self, m_max: int) -> np.ndarray:
        """Array ``v`` with ``v[m] = c(m)`` for ``1 <= m <= m_max``; ``v[0] = 0``."""
        v = np.zeros(m_max + 1)
        if self.kind == "unit":
            v[1:] = 1.0
        elif self.kind == "chi":
            if self.n <= m_max:
                v[self.n] = 1.0
        elif self.kind == "binlen":
            v[1:] = _bit_lengths(m_max)
        else:
            k = min(m_max, len(self.table))
            v[1:k + 1] = self.table[:k]
        return v

    @property
    def is_lattice(self) -> bool:
        return self.span is not None

    @property
    def span(self) -> Optional[float]:
        """Largest ``L`` with ``c / L`` integer valued, ``None`` if non-lattice."""
        if self.kind != "custom":
            return 1.0
        vals = [v for v in self.table if v != 0]
        if not vals or any(float(v) != int(v) for v in vals):
            return None
        return float(math.gcd(*[int(v) for v in vals]))

    @property
    def integer_valued(self) -> bool:
        return self.kind != "custom" or all(float(v) == int(v) for v in self.table)

    @property
    def exponent(self) -> float:
        """Exponent ``d = A/2 + B / (2 log phi)`` from the growth pair."""
        a = self.A / 2.0
        b = -self.B / math.log(RHO)
        return a + b

    def max_value(self, m_max: int) -> float:
        if self.kind == "unit" or self.kind == "chi":
            return 1.0
        if self.kind == "binlen":
            return float(int(m_max).bit_length())
        return float(max(self.table[:m_max], default=0.0))

    def tail_blocks(self, m0: int) -> Iterator[Tuple[int, Optional[int], float]]:
        """Blocks ``(lo, hi, value)`` covering ``m > m0`` with constant cost.

        ``hi`` is inclusive, ``None`` for an unbounded final block.  The
        binary-length cost yields infinitely many dyadic blocks.
        """
        lo = m0 + 1
        if self.kind == "unit":
            yield lo, None, 1.0
        elif self.kind == "chi":
            if self.n >= lo:
                if self.n > lo:
                    yield lo, self.n - 1, 0.0
                yield self.n, self.n, 1.0
                lo = self.n + 1
            yield lo, None, 0.0
        elif self.kind == "binlen":
            k = int(lo).bit_length()
            while True:
                hi = (1 << k) - 1
                yield lo, hi, float(k)
                lo = hi + 1
                k += 1
        else:
            n = len(self.table)
            while lo <= n:
                yield lo, lo, float(self.table[lo - 1])
                lo += 1
            yield lo, None, 0.0


def _bit_lengths(m_max: int) -> np.ndarray:
    out = np.empty(m_max)
    lo = 1
    k = 1
    while lo <= m_max:
        hi = min(2 * lo - 1, m_max)
        out[lo - 1:hi] = k
        lo = hi + 1
        k += 1
    return out


def unit_cost() -> CostSpec:
    return CostSpec("unit", A=0.0, B=1.0)


def chi_cost(n: int) -> CostSpec:
    return CostSpec("chi", n=n, A=0.0, B=1.0)


def binlen_cost() -> CostSpec:
    return CostSpec("binlen", A=1.0 / math.log(2.0), B=1.0)


def custom_cost(table, A: float, B: float) -> CostSpec:
    return CostSpec("custom", table=tuple(float(v) for v in table), A=A, B=B)


def cost_from_name(name: str, digit: Optional[int] = None) -> CostSpec:
    """Parse a cost name such as ``unit`` or ``chi3`` (``chi`` takes ``digit``)."""
    if name == "unit":
        return unit_cost()
    if name == "binlen":
        return binlen_cost()
    if name == "chi":
        if digit is None:
            raise ValueError("chi cost needs a digit")
        return chi_cost(digit)
    if name.startswith("chi") and name[3:].isdigit():
        return chi_cost(int(name[3:]))
    raise ValueError(f"unknown cost {name!r}")


def audit_moderate_growth(cost: CostSpec, m_max: int) -> GrowthCertificate:
    """Check ``c(m) <= A log m + B`` for ``m <= m_max`` and return the exponent.

    The exponent is ``d = a + b`` with ``A = 2a`` and ``B = -b log(phi^-2)``.
    """
    if m_max < 2:
        raise ValueError("audit needs m_max >= 2")
    m = np.arange(1, m_max + 1)
    vals = cost.values(m_max)[1:]
    bound = cost.A * np.log(m) + cost.B
    bad = np.nonzero(vals > bound * (1 + 1e-12) + 1e-12)[0]
    if bad.size:
        i = int(bad[0])
        raise GrowthCertificateError(cost, i + 1, float(vals[i]), float(bound[i]))
    a = cost.A / 2.0
    b = -cost.B / math.log(RHO)
    return GrowthCertificate(cost.A, cost.B, a, b, a + b, m_max)
