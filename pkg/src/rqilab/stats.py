"""Empirical statistics of P_N confronted with the spectral constants."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import kstest, norm

from .costs import CostSpec, unit_cost
from .orbits import DEFAULT_W_GRID, PopulationSummary, population_grid


class UnsupportedCostError(ValueError):
    """Local limit windows need a lattice cost."""


def empirical_moments(summary: PopulationSummary, cost_id: str = "unit") -> Tuple[float, float]:
    """Uniform mean and variance of ``C`` over ``P_N`` from the running sums."""
    if summary.count == 0:
        raise ValueError("empty population")
    k = summary.index(cost_id)
    n = summary.count
    mean = summary.csum[k] / n
    var = max(summary.csq[k] / n - mean * mean, 0.0)
    return float(mean), float(var)


def moments_from_histogram(summary: PopulationSummary, cost_id: str = "unit") -> Tuple[float, float]:
    """Same moments recomputed from the integer histogram (second bookkeeping path)."""
    h = summary.histogram(cost_id)
    n = h.sum()
    if n == 0:
        raise ValueError("empty population")
    v = np.arange(h.size, dtype=float)
    mean = (h * v).sum() / n
    var = (h * (v - mean) ** 2).sum() / n
    return float(mean), float(var)


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    max_residual: float


def slope_fit(points: Sequence[Tuple[float, float]]) -> SlopeFit:
    """Least-squares line through ``(log N, value)`` points."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 3:
        raise ValueError("slope_fit needs at least 3 points")
    x, y = pts[:, 0], pts[:, 1]
    if np.ptp(x) == 0:
        raise ValueError("degenerate abscissae")
    A = np.column_stack([x, np.ones_like(x)])
    (a, b), *_ = np.linalg.lstsq(A, y, rcond=None)
    return SlopeFit(float(a), float(b), float(np.abs(A @ [a, b] - y).max()))


def lattice_ks(hist: np.ndarray, center: float, scale: float, midpoint: bool = False) -> float:
    """KS distance between the law of ``(C - center)/scale`` (atoms on the integers) and N(0, 1).

    With ``midpoint`` the normal CDF is read half a lattice step above each
    atom (continuity correction); reported as a diagnostic only.
    """
    n = hist.sum()
    if n == 0:
        raise ValueError("empty histogram")
    v = np.arange(hist.size, dtype=float)
    F = np.cumsum(hist) / n
    if midpoint:
        nz = np.nonzero(hist)[0]
        sl = slice(max(nz[0] - 1, 0), nz[-1] + 1)
        return float(np.abs(F[sl] - norm.cdf((v[sl] + 0.5 - center) / scale)).max())
    atoms = hist > 0
    Phi = norm.cdf((v - center) / scale)
    below = F - hist / n
    return float(max(np.abs(F - Phi)[atoms].max(), np.abs(below - Phi)[atoms].max()))


def standardized_ks(summary: PopulationSummary, mu: float, nu: float, N: Optional[float] = None,
                    cost_id: str = "unit") -> float:
    """KS distance of ``(C - mu log N) / sqrt(nu log N)`` to the standard normal."""
    if nu <= 0:
        raise ValueError("nu must be positive")
    if summary.count < 100:
        raise ValueError("standardized_ks needs at least 100 elements")
    lN = math.log(summary.N if N is None else N)
    return lattice_ks(summary.histogram(cost_id), mu * lN, math.sqrt(nu * lN))


def ks_normal(samples) -> float:
    """KS distance of raw samples to N(0, 1) (harness self-test)."""
    return float(kstest(np.asarray(samples, dtype=float), "norm").statistic)


def empirical_mgf(summary: PopulationSummary, w: float, cost_id: str = "unit") -> float:
    """``M_N(w) = S_w(N) / S_0(N)``; ``w`` must be on the accumulated grid."""
    if w == 0:
        return 1.0
    try:
        i = summary.w_grid.index(float(w))
    except ValueError:
        raise KeyError(f"w = {w} was not accumulated; re-enumerate with it on the grid") from None
    return float(summary.mgf[summary.index(cost_id), i] / summary.count)


def lattice_window_counts(summary: PopulationSummary, cost_id: str = "unit") -> np.ndarray:
    """Counts in the windows ``|C - k| <= 1/2`` for integer ``k``; they sum to ``|P_N|`` exactly."""
    return summary.histogram(cost_id).copy()


def local_limit_window(summary: PopulationSummary, y: float, mu: float, nu: float,
                       N: Optional[float] = None, cost: Optional[CostSpec] = None,
                       L: Optional[float] = None) -> Tuple[float, float]:
    """Empirical ``P_N[|C - Q| <= L/2]`` with ``Q = mu log N + y sqrt(nu log N)`` and its Gaussian value."""
    cost = cost or unit_cost()
    if not cost.is_lattice:
        raise UnsupportedCostError("local limit windows are only available for lattice costs")
    L = cost.span if L is None else L
    if nu <= 0:
        raise ValueError("nu must be positive")
    lN = math.log(summary.N if N is None else N)
    Q = mu * lN + y * math.sqrt(nu * lN)
    h = summary.histogram(cost.id)
    v = np.arange(h.size) * 1.0
    inside = np.abs(v - Q) <= L / 2 + 1e-12
    emp = h[inside].sum() / summary.count
    pred = L / math.sqrt(nu * lN) * math.exp(-y * y / 2) / math.sqrt(2 * math.pi)
    return float(emp), float(pred)


@dataclass(frozen=True)
class LogEpsRow:
    N: float
    mean: float
    var: float
    exact_mean: float
    exact_var: float


@dataclass(frozen=True)
class LogEpsStudy:
    rows: Tuple[LogEpsRow, ...]
    slope: SlopeFit
    var_ratio: float


def log_epsilon_study(summaries: Sequence[PopulationSummary]) -> LogEpsStudy:
    """Mean and variance of ``log eps`` over each ``P_N``.

    ``|P_x| ~ kappa x^2`` makes ``log N - log eps`` asymptotically exponential
    with rate 2, so the reference values are ``log N - 1/2`` and ``1/4``.
    """
    rows = []
    for sm in sorted(summaries, key=lambda s: s.N):
        m = sm.logeps_sum / sm.count
        v = max(sm.logeps_sq / sm.count - m * m, 0.0)
        rows.append(LogEpsRow(sm.N, m, v, math.log(sm.N) - 0.5, 0.25))
    fit = slope_fit([(math.log(r.N), r.mean) for r in rows]) if len(rows) >= 3 else None
    ratio = rows[-1].var / rows[-2].var if len(rows) >= 2 else float("nan")
    return LogEpsStudy(tuple(rows), fit, ratio)


# ---------------------------------------------------------------------------
# study pipeline
# ---------------------------------------------------------------------------


@dataclass
class StudyRow:
    N: float
    count: int
    mean: float
    var: float
    ks: float
    mgf: Dict[float, float]


@dataclass
class EmpiricalStudy:
    N_grid: Tuple[float, ...]
    cost: CostSpec
    rows: List[StudyRow]
    mean_fit: SlopeFit
    var_fit: SlopeFit
    mu: float
    nu: float
    summaries: List[PopulationSummary] = field(default_factory=list, repr=False)

    def to_json(self) -> dict:
        return {
            "cost": self.cost.id,
            "N_grid": list(self.N_grid),
            "mu_spectral": self.mu, "nu_spectral": self.nu,
            "mean_fit": vars(self.mean_fit), "var_fit": vars(self.var_fit),
            "rows": [{"N": r.N, "count": r.count, "mean": r.mean, "var": r.var, "ks": r.ks,
                      "mgf": {repr(k): v for k, v in sorted(r.mgf.items())}} for r in self.rows],
        }

    def write_csv(self, path) -> None:
        ws = sorted(self.rows[0].mgf) if self.rows else []
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["N", "count", "mean", "var", "ks"] + [f"mgf@{w!r}" for w in ws])
            for r in self.rows:
                wr.writerow([repr(r.N), r.count, repr(r.mean), repr(r.var), repr(r.ks)]
                            + [repr(r.mgf[w]) for w in ws])

    def write_histogram_csv(self, path, N: Optional[float] = None) -> None:
        sm = self.summaries[-1] if N is None else next(s for s in self.summaries if s.N == N)
        h = sm.histogram(self.cost.id)
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["cost_value", "count"])
            for v in np.nonzero(h)[0]:
                wr.writerow([int(v), int(h[v])])


def run_study(N_grid: Sequence[float], cost: CostSpec, mu: float, nu: float,
              w_grid: Sequence[float] = DEFAULT_W_GRID,
              summaries: Optional[Sequence[PopulationSummary]] = None, **scan_kw) -> EmpiricalStudy:
    """One scan over ``N_grid`` and every per-N statistic against ``(mu, nu)``."""
    if summaries is None:
        summaries = population_grid(N_grid, [cost], w_grid, **scan_kw)
    rows = []
    for sm in summaries:
        m, v = empirical_moments(sm, cost.id)
        ks = standardized_ks(sm, mu, nu, cost_id=cost.id) if cost.integer_valued else float("nan")
        mg = {w: empirical_mgf(sm, w, cost.id) for w in sm.w_grid}
        rows.append(StudyRow(sm.N, sm.count, m, v, ks, mg))
    mf = slope_fit([(math.log(r.N), r.mean) for r in rows])
    vf = slope_fit([(math.log(r.N), r.var) for r in rows])
    return EmpiricalStudy(tuple(float(n) for n in N_grid), cost, rows, mf, vf, mu, nu, list(summaries))
