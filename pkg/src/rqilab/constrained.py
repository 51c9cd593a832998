"""Digits bounded by M: the dimension sigma_M and how often small digits occur.

The capped operator ``H_{M,s} f = sum_{m <= M} (m + x)^{-2s} f(1/(m + x))`` is a
finite sum, so it is assembled exactly with no tail.
"""
from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Sequence

import numpy as np

from .costs import CostSpec, unit_cost
from .orbits import population_grid
from .spectral import (ConvergenceError, GaussianConstants, SpectralConfig, _constants,
                       gaussian_constants, lambda_batch, lambda_ds, sigma_batch)

ZETA2 = math.pi ** 2 / 6.0
DIM_CONFIG = SpectralConfig(D=64)


def _capped(cfg: SpectralConfig, M: Optional[int]) -> SpectralConfig:
    return replace(cfg, digit_cap=None if M is None else int(M))


def lambda_M(s: float, M: Optional[int], cfg: SpectralConfig = DIM_CONFIG) -> float:
    """Dominant eigenvalue of the operator restricted to digits ``<= M`` (``None`` for no cap)."""
    if s <= 0.5:
        raise ValueError("lambda_M needs s > 1/2")
    if M is not None and M < 1:
        raise ValueError("M must be >= 1")
    return float(lambda_batch(float(s), 0.0, unit_cost(), _capped(cfg, M))[0])


@dataclass(frozen=True)
class DimensionResult:
    M: int
    sigma_M: float
    residual: float
    order: int
    drift: float = float("nan")


def _solve_dim(M: int, cfg: SpectralConfig, tol: float) -> float:
    lo, hi = 0.5 + 1e-9, 1.0
    f_lo = lambda_M(lo, M, cfg) - 1
    f_hi = lambda_M(hi, M, cfg) - 1
    if not (f_lo > 0 > f_hi):
        raise ConvergenceError(f"sigma_{M} not bracketed in (1/2, 1)", min(abs(f_lo), abs(f_hi)))
    while hi - lo > 1e-3:
        mid = 0.5 * (lo + hi)
        if lambda_M(mid, M, cfg) > 1:
            lo = mid
        else:
            hi = mid
    return float(sigma_batch([0.0], unit_cost(), _capped(cfg, M), s0=0.5 * (lo + hi), tol=tol)[0])


def hausdorff_dim(M: int, cfg: SpectralConfig = DIM_CONFIG, tol: float = 1e-13,
                  check_doubling: bool = True) -> DimensionResult:
    """Root of ``lambda_M(s) = 1`` in (1/2, 1): bisection, then Newton; drift from doubling D."""
    if M < 2:
        raise ValueError("hausdorff_dim needs M >= 2")
    sig = _solve_dim(M, cfg, tol)
    res = abs(lambda_M(sig, M, cfg) - 1)
    drift = float("nan")
    if check_doubling:
        drift = abs(_solve_dim(M, replace(cfg, D=2 * cfg.D), tol) - sig)
    return DimensionResult(M, sig, float(res), cfg.D, float(drift))


def cycle_expansion_dimension(M: int, max_len: int = 14, lo: float = 0.5001,
                              hi: float = 1.0, tol: float = 1e-12) -> float:
    """Dimension from the Fredholm determinant ``det(1 - H_s)``.

    ``log det(1 - z H) = -sum_n z^n Tr H^n / n`` with the traces summed over
    all words of length ``n`` in digits ``<= M``; bisection on the sign of
    the truncated determinant at ``z = 1``.
    """
    logs = []
    dets = []
    for n in range(1, max_len + 1):
        words = np.array(list(itertools.product(range(1, M + 1), repeat=n)), dtype=float)
        a, b, c, d = (np.ones(len(words)), np.zeros(len(words)),
                      np.zeros(len(words)), np.ones(len(words)))
        for col in words.T:
            a, b = b, a + col * b
            c, d = d, c + col * d
        t = a + d
        det = (-1.0) ** n
        logs.append(np.log(2.0 / (t + np.sqrt(t * t - 4 * det))))
        dets.append(det)

    def fred(s):
        tr = [np.sum(np.exp(2 * s * la) / (1 - dt * np.exp(2 * la))) for la, dt in zip(logs, dets)]
        cf = [1.0]
        for n in range(1, max_len + 1):
            cf.append(-sum(tr[k - 1] * cf[n - k] for k in range(1, n + 1)) / n)
        return sum(cf)

    f_lo, f_hi = fred(lo), fred(hi)
    if f_lo * f_hi > 0:
        raise ConvergenceError("determinant has no sign change", min(abs(f_lo), abs(f_hi)))
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if fred(mid) * f_lo > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def two_term_expansion(M: float) -> float:
    """Two-term prediction of ``2 (sigma_M - 1)``."""
    if M < 2:
        raise ValueError("M must be >= 2")
    return -2.0 / (ZETA2 * M) - 4.0 * math.log(M) / (ZETA2 ** 2 * M * M)


def constrained_constants(M: Optional[int], cost: Optional[CostSpec] = None,
                          cfg: SpectralConfig = DIM_CONFIG) -> GaussianConstants:
    """Gaussian constants along ``lambda_M(sigma_M(w), w) = 1`` anchored at ``sigma_M``."""
    cost = cost or unit_cost()
    if M is None:
        return gaussian_constants(cost, replace(cfg, digit_cap=None))
    if M < 2:
        raise ValueError("M must be >= 2")
    dim = hausdorff_dim(M, cfg, check_doubling=False)
    ccfg = _capped(cfg, M)
    gc = _constants(cost, ccfg, dim.sigma_M)
    lam_s = float(lambda_ds(dim.sigma_M, 0.0, cost, ccfg)[0])
    gc.diagnostics["sigma_M"] = dim.sigma_M
    gc.diagnostics["mu_formula"] = -2.0 / lam_s if cost.kind == "unit" else None
    gc.diagnostics["note"] = "Gaussian behavior is asserted only for M large enough"
    return gc


# ---------------------------------------------------------------------------
# threshold probe
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ThresholdRow:
    N: float
    M: int
    pi: float
    prediction: float
    count: int
    capped_count: int


def sigma_for_cap(M: int, cfg: SpectralConfig = DIM_CONFIG) -> float:
    """``sigma_M``; the single-branch system ``M = 1`` has ``lambda_1(s) = phi^{-2s}`` so ``sigma_1 = 0``."""
    if M == 1:
        return 0.0
    return hausdorff_dim(M, cfg, check_doubling=False).sigma_M


def threshold_probe(N_grid: Sequence[float], M_grid: Sequence[int],
                    cfg: SpectralConfig = DIM_CONFIG, **scan_kw) -> List[ThresholdRow]:
    """``pi(N, M) = |P_N[M]| / |P_N|`` from one scan, against ``N^{2 (sigma_M - 1)}``."""
    summaries = population_grid(N_grid, [unit_cost()], (), **scan_kw)
    sig: Dict[int, float] = {M: sigma_for_cap(M, cfg) for M in sorted(set(M_grid))}
    rows = []
    for sm in summaries:
        for M in M_grid:
            k = sm.count_with_digits_at_most(M)
            rows.append(ThresholdRow(sm.N, int(M), k / sm.count,
                                     sm.N ** (2 * (sig[M] - 1)), sm.count, k))
    return rows


def write_dimension_csv(path, results: Sequence[DimensionResult]) -> None:
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(("M", "sigma_M", "residual", "two_term", "gap"))
        for r in results:
            pred = two_term_expansion(r.M)
            wr.writerow([r.M, repr(r.sigma_M), repr(r.residual), repr(pred),
                         repr(2 * (r.sigma_M - 1) - pred)])


def write_threshold_csv(path, rows: Sequence[ThresholdRow]) -> None:
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(("N", "M", "pi", "prediction"))
        for r in rows:
            wr.writerow([repr(r.N), r.M, repr(r.pi), repr(r.prediction)])
