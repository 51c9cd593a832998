"""Enumeration of reduced quadratic irrationals by fundamental unit.

Every rqi is one rotation of a primitive necklace of digits, and all
rotations share the unit ``eps`` and the additive cost.  The search walks
prenecklaces in lexicographic order and emits Lyndon words, so
each necklace is seen once and weighted by its period.

A word with trace ``t`` has ``eps + 1/eps = T`` where ``T = t`` for even
periods and ``T = t^2 + 2`` for odd ones, so ``eps <= N`` is the integer test
``T <= N + 1/N``.  Ties ``eps == N`` are included.
"""
from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .cfcore import SizeTriple, lft_of_word, size_triple
from .costs import CostSpec, binlen_cost, chi_cost, unit_cost
from .kernels import ScanResult, max_period, scan_necklaces

TIE_CONVENTION = "epsilon <= N (ties included)"
DEFAULT_W_GRID = (-0.1, -0.05, -0.02, 0.02, 0.05, 0.1)


def canonical_rotation(word: Sequence[int]) -> Tuple[int, ...]:
    """Lexicographically least rotation, in linear time."""
    w = tuple(int(m) for m in word)
    if not w:
        raise ValueError("empty word")
    s = w + w
    n = len(s)
    f = [-1] * n
    k = 0
    for j in range(1, n):
        sj = s[j]
        i = f[j - k - 1]
        while i != -1 and sj != s[k + i + 1]:
            if sj < s[k + i + 1]:
                k = j - i - 1
            i = f[i]
        if sj != s[k + i + 1]:
            if sj < s[k]:
                k = j
            f[j - k] = -1
        else:
            f[j - k] = i + 1
    return s[k:k + len(w)]


def is_primitive(word: Sequence[int]) -> bool:
    """True unless ``word`` is a power ``u^k`` with ``k >= 2``."""
    w = tuple(word)
    if not w:
        raise ValueError("empty word")
    p = len(w)
    for d in range(1, p):
        if p % d == 0 and w == w[:d] * (p // d):
            return False
    return True


def epsilon_bound(N: float) -> float:
    if N <= 1:
        raise ValueError("N must exceed 1")
    return N + 1.0 / N


@dataclass(frozen=True)
class PeriodicOrbit:
    word: Tuple[int, ...]
    period: int
    sizes: SizeTriple
    costs: Dict[str, float] = field(default_factory=dict)

    @property
    def epsilon(self) -> float:
        return self.sizes.epsilon


def _prenecklaces(bound: float, cap: Optional[int]):
    """Yield ``(word, is_lyndon, trace)`` for every prenecklace with continuant <= bound."""
    maxlen = max_period(bound)
    a = [0] * (maxlen + 1)

    def rec(t, p, p11, p12, p21, p22):
        lo = a[t - p] if t > 1 else 1
        m = lo
        while True:
            q = p21 + m * p22
            if q > bound or (cap is not None and m > cap):
                return
            a[t] = m
            n11, n12, n21, n22 = p12, p11 + m * p12, p22, q
            np_ = p if (t > 1 and m == a[t - p]) else t
            yield tuple(a[1:t + 1]), np_ == t, n11 + n22
            if t < maxlen:
                yield from rec(t + 1, np_, n11, n12, n21, n22)
            m += 1

    yield from rec(1, 1, 1, 0, 0, 1)


def enumerate_necklaces(N: float, digit_cap: Optional[int] = None,
                        costs: Sequence[CostSpec] = ()) -> Iterator[PeriodicOrbit]:
    """Stream one ``PeriodicOrbit`` per primitive necklace with ``eps <= N``.

    Pure Python; meant for audits and small N.  Use ``population`` for counts.
    """
    bound = epsilon_bound(N)
    for word, lyndon, t in _prenecklaces(bound, digit_cap):
        if not lyndon:
            continue
        T = t if len(word) % 2 == 0 else t * t + 2
        if T > bound:
            continue
        yield PeriodicOrbit(
            word=word, period=len(word), sizes=size_triple(word),
            costs={c.id: float(sum(c(m) for m in word)) for c in costs})


@dataclass
class PopulationSummary:
    """Accumulated statistics of ``P_N`` (every rotation counted)."""

    N: float
    count: int
    necklaces: int
    cost_ids: Tuple[str, ...]
    w_grid: Tuple[float, ...]
    s_grid: Tuple[float, ...]
    csum: np.ndarray
    csq: np.ndarray
    mgf: np.ndarray
    dirichlet: np.ndarray
    hist: np.ndarray
    hist_valid: Tuple[bool, ...]
    logeps_sum: float
    logeps_sq: float
    maxdig: np.ndarray
    digit_cap: Optional[int] = None
    tie_convention: str = TIE_CONVENTION

    def index(self, cost_id: str) -> int:
        try:
            return self.cost_ids.index(cost_id)
        except ValueError:
            raise KeyError(f"cost {cost_id!r} was not accumulated") from None

    def histogram(self, cost_id: str) -> np.ndarray:
        k = self.index(cost_id)
        if not self.hist_valid[k]:
            raise ValueError(f"cost {cost_id!r} is not integer valued; no histogram")
        return self.hist[k]

    def count_with_digits_at_most(self, M: int) -> int:
        return int(self.maxdig[:M + 1].sum())

    def __add__(self, other: "PopulationSummary") -> "PopulationSummary":
        if (self.N, self.cost_ids, self.w_grid, self.s_grid) != (
                other.N, other.cost_ids, other.w_grid, other.s_grid):
            raise ValueError("summaries differ in bound, costs or grids")
        n = max(self.maxdig.size, other.maxdig.size)
        md = np.zeros(n, np.int64)
        md[:self.maxdig.size] += self.maxdig
        md[:other.maxdig.size] += other.maxdig
        return PopulationSummary(
            N=self.N, count=self.count + other.count,
            necklaces=self.necklaces + other.necklaces,
            cost_ids=self.cost_ids, w_grid=self.w_grid, s_grid=self.s_grid,
            csum=self.csum + other.csum, csq=self.csq + other.csq,
            mgf=self.mgf + other.mgf, dirichlet=self.dirichlet + other.dirichlet,
            hist=self.hist + other.hist, hist_valid=self.hist_valid,
            logeps_sum=self.logeps_sum + other.logeps_sum,
            logeps_sq=self.logeps_sq + other.logeps_sq,
            maxdig=md, digit_cap=self.digit_cap, tie_convention=self.tie_convention)

    def to_json(self) -> dict:
        out = {
            "N": self.N,
            "count": self.count,
            "necklaces": self.necklaces,
            "digit_cap": self.digit_cap,
            "tie_convention": self.tie_convention,
            "log_epsilon": {"sum": self.logeps_sum, "sum_sq": self.logeps_sq},
            "costs": {},
        }
        for k, cid in enumerate(self.cost_ids):
            entry = {
                "sum": float(self.csum[k]),
                "sum_sq": float(self.csq[k]),
                "mgf": {repr(w): float(self.mgf[k, i]) for i, w in enumerate(self.w_grid)},
            }
            if self.hist_valid[k]:
                h = self.hist[k]
                nz = np.nonzero(h)[0]
                entry["histogram"] = {int(v): int(h[v]) for v in nz}
            out["costs"][cid] = entry
        return out


def _partitions(cap: int, n_parts: int) -> List[Tuple[int, int]]:
    """First-digit ranges, roughly geometric so the work is spread out."""
    if n_parts <= 1:
        return [(1, cap)]
    edges = [1]
    while len(edges) < n_parts and edges[-1] * 2 <= cap:
        edges.append(edges[-1] * 2)
    parts = [(lo, hi - 1) for lo, hi in zip(edges, edges[1:])]
    parts.append((edges[-1], cap))
    return parts


def default_costs() -> List[CostSpec]:
    return [unit_cost(), chi_cost(1), binlen_cost()]


def population_grid(N_grid: Sequence[float], costs: Sequence[CostSpec] = (),
                    w_grid: Sequence[float] = DEFAULT_W_GRID,
                    digit_cap: Optional[int] = None, s_grid: Sequence[float] = (),
                    partitions: int = 1, threads: int = 1,
                    use_numba: Optional[bool] = None) -> List[PopulationSummary]:
    """One scan at ``max(N_grid)`` producing a summary for every bound.

    Partitions split the search by first digit; they are merged in ascending
    order so results do not depend on ``threads``.
    """
    Ns = sorted(float(n) for n in N_grid)
    if not Ns or Ns[0] <= 1:
        raise ValueError("population bounds must exceed 1")
    costs = list(costs) or default_costs()
    bounds = np.array([epsilon_bound(n) for n in Ns])
    top = int(math.floor(bounds[-1]))
    cap = top if digit_cap is None else max(1, min(int(digit_cap), top))
    tab = np.array([c.values(cap) for c in costs])
    maxlen = max_period(bounds[-1])
    hist_size = int(maxlen * max(c.max_value(cap) for c in costs)) + 2
    parts = _partitions(cap, partitions)

    def job(part):
        return scan_necklaces(bounds, cap, tab, w_grid, s_grid, hist_size,
                              first_lo=part[0], first_hi=part[1], use_numba=use_numba)

    if threads > 1 and len(parts) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(job, parts))
    else:
        results = [job(p) for p in parts]
    total = results[0]
    for r in results[1:]:
        total += r

    cum = {f: np.cumsum(getattr(total, f), axis=0) for f in ScanResult.FIELDS}
    hist_valid = tuple(c.integer_valued for c in costs)
    out = []
    for g, n in enumerate(Ns):
        out.append(PopulationSummary(
            N=n, count=int(cum["counts"][g]), necklaces=int(cum["necklaces"][g]),
            cost_ids=tuple(c.id for c in costs), w_grid=tuple(float(w) for w in w_grid),
            s_grid=tuple(float(s) for s in s_grid),
            csum=cum["csum"][g], csq=cum["csq"][g], mgf=cum["mgf"][g],
            dirichlet=cum["dirichlet"][g], hist=cum["hist"][g], hist_valid=hist_valid,
            logeps_sum=float(cum["logeps"][g, 0]), logeps_sq=float(cum["logeps"][g, 1]),
            maxdig=cum["maxdig"][g], digit_cap=digit_cap))
    return out


def population(N: float, costs: Sequence[CostSpec] = (),
               w_grid: Sequence[float] = DEFAULT_W_GRID,
               digit_cap: Optional[int] = None, **kw) -> PopulationSummary:
    return population_grid([N], costs, w_grid, digit_cap, **kw)[0]


def count_PN(N: float, digit_cap: Optional[int] = None) -> int:
    return population(N, [unit_cost()], (), digit_cap).count


AUDIT_COLUMNS = ("word", "period", "epsilon", "q", "cost_unit", "cost_chi_n", "cost_binlen")


def write_audit_csv(path, N: float, digit_cap: Optional[int] = None, chi_digit: int = 1,
                    expand_rotations: bool = True) -> int:
    """Write one row per rqi (or per necklace); returns the number of rows."""
    costs = [unit_cost(), chi_cost(chi_digit), binlen_cost()]
    rows = 0
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(AUDIT_COLUMNS)
        for orb in enumerate_necklaces(N, digit_cap, costs):
            words = ([orb.word[i:] + orb.word[:i] for i in range(orb.period)]
                     if expand_rotations else [orb.word])
            for w in words:
                wr.writerow(["-".join(map(str, w)), orb.period, repr(orb.epsilon),
                             lft_of_word(w).d, orb.costs["unit"],
                             orb.costs[costs[1].id], orb.costs["binlen"]])
                rows += 1
    return rows
