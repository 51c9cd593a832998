"""The acceptance suite: fourteen numbered criteria with machine-readable results."""
from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

import mpmath
import numpy as np

from .cfcore import lft_of_word
from .constrained import (DIM_CONFIG, cycle_expansion_dimension, hausdorff_dim,
                          two_term_expansion)
from .costs import binlen_cost, chi_cost, unit_cost
from .orbits import canonical_rotation, enumerate_necklaces, is_primitive, population_grid
from .spectral import (SpectralConfig, build_operator, chebyshev_nodes, dominant_eigen,
                       entropy, gaussian_constants, lambda_batch, lambda_partials,
                       mean_cost_closed_form, OperatorParams)
from .stats import (empirical_mgf, empirical_moments, lattice_ks, lattice_window_counts,
                    local_limit_window, log_epsilon_study, slope_fit, standardized_ks)
from .traces import Yk, quasi_powers_prediction

CARDINALITY_CONSTANT = 0.2106913
SIGMA_2 = 0.5312805


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    details: Dict[str, object] = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.number:2d} {self.title} ({self.seconds:.1f}s)"


def brute_force_population(N: int, max_period: int = 9, max_digit: int = 50) -> Dict[tuple, int]:
    """Every primitive word with ``eps <= N`` by plain depth-first search.

    Returns ``{necklace: number of rotations}``.  Uses 50-digit arithmetic for
    ``eps`` and is independent of the prenecklace scan.
    """
    mpmath.mp.dps = 50
    out: Dict[tuple, int] = {}
    stack = [()]
    while stack:
        word = stack.pop()
        if word:
            h = lft_of_word(word)
            t = h.trace
            rho = (t + mpmath.sqrt(t * t - 4 * h.det)) / 2
            eps = rho if len(word) % 2 == 0 else rho ** 2
            if eps <= N and is_primitive(word):
                key = canonical_rotation(word)
                out[key] = out.get(key, 0) + 1
        if len(word) < max_period:
            for m in range(1, max_digit + 1):
                nxt = word + (m,)
                # the continuant bounds eps from below and grows along extensions
                if lft_of_word(nxt).d > N + 1:
                    break
                stack.append(nxt)
    return out


class Context:
    """Shared, lazily computed inputs (one scan, one set of constants)."""

    def __init__(self, quick: bool = False, threads: int = 1):
        self.quick = quick
        self.threads = threads
        self.N_grid = (1e2, 10 ** 2.5, 1e3) if quick else (1e2, 1e3, 1e4)
        self.cfg = SpectralConfig(D=32) if quick else SpectralConfig()
        self._pop = None
        self._const: Dict[str, object] = {}

    @property
    def populations(self):
        if self._pop is None:
            self._pop = population_grid(self.N_grid, [unit_cost(), chi_cost(1)],
                                        partitions=max(self.threads, 1), threads=self.threads)
        return self._pop

    def constants(self, name: str):
        if name not in self._const:
            cost = unit_cost() if name == "unit" else chi_cost(1)
            self._const[name] = gaussian_constants(cost, self.cfg)
        return self._const[name]


def c01(ctx: Context) -> CriterionResult:
    Ns = list(range(2, 51))
    pops = population_grid(Ns, [unit_cost()], ())
    brute = brute_force_population(50)
    eps = {k: _eps(k) for k in brute}
    mism = []
    for N, sm in zip(Ns, pops):
        bc = sum(v for k, v in brute.items() if eps[k] <= N)
        if bc != sm.count:
            mism.append((N, bc, sm.count))
    neck = {o.word for o in enumerate_necklaces(50)}
    same = neck == set(brute)
    p3, p4 = pops[1].count, pops[2].count
    ok = p3 == 1 and p4 == 3 and not mism and same
    return CriterionResult(1, "exact small populations", ok,
                           {"P3": p3, "P4": p4, "count_mismatches": mism,
                            "necklace_sets_equal": same, "necklaces_50": len(neck)})


def _eps(word):
    h = lft_of_word(word)
    t = h.trace
    rho = (t + mpmath.sqrt(t * t - 4 * h.det)) / 2
    return rho if len(word) % 2 == 0 else rho ** 2


def c02(ctx: Context) -> CriterionResult:
    a, b = ctx.populations[-2], ctx.populations[-1]
    ra, rb = a.count / a.N ** 2, b.count / b.N ** 2
    ok = 0.19 <= rb <= 0.23 and abs(rb - CARDINALITY_CONSTANT) < abs(ra - CARDINALITY_CONSTANT)
    return CriterionResult(2, "cardinality asymptotics", ok,
                           {"N": [a.N, b.N], "counts": [a.count, b.count], "ratios": [ra, rb]})


def c03(ctx: Context) -> CriterionResult:
    e = entropy(ctx.cfg)
    return CriterionResult(3, "entropy", e.discrepancy <= 1e-8,
                           {"spectral": e.spectral, "closed": e.closed, "discrepancy": e.discrepancy})


def c04(ctx: Context) -> CriterionResult:
    op = build_operator(OperatorParams.from_config(1.0, 0.0, unit_cost(), ctx.cfg))
    sol = dominant_eigen(op)
    x, _ = chebyshev_nodes(ctx.cfg.D)
    psi = 1.0 / ((1 + x) * math.log(2))
    f = sol.right_values
    f = f * (f @ psi) / (f @ f)
    err = float(np.abs(f - psi).max())
    dl = abs(sol.lam - 1.0)
    return CriterionResult(4, "Gauss fixed point", dl <= 1e-12 and err <= 1e-10,
                           {"lambda_minus_1": dl, "sup_error": err})


def c05(ctx: Context) -> CriterionResult:
    rows = {}
    for c in (unit_cost(), chi_cost(1), chi_cost(2), chi_cost(3), binlen_cost()):
        dw = float(np.real(lambda_partials(1.0, 0.0, c, ctx.cfg).dw))
        rows[c.id] = {"spectral": dw, "closed": mean_cost_closed_form(c),
                      "gap": abs(dw - mean_cost_closed_form(c))}
    ok = all(r["gap"] <= 1e-7 for r in rows.values())
    return CriterionResult(5, "mean-cost identities", ok, rows)


def c06(ctx: Context) -> CriterionResult:
    ws = np.array([0.1, -0.1, 0.05, -0.05])
    lam = lambda_batch(np.ones(4), ws, unit_cost(), ctx.cfg)
    gaps = np.abs(lam - np.exp(ws))
    return CriterionResult(6, "unit-cost factorization", bool(gaps.max() <= 1e-11),
                           {repr(float(w)): float(g) for w, g in zip(ws, gaps)})


def _mean_slope(ctx, cid):
    return slope_fit([(math.log(sm.N), empirical_moments(sm, cid)[0]) for sm in ctx.populations])


def c07(ctx: Context) -> CriterionResult:
    det = {}
    ok = True
    for name, cid in (("unit", "unit"), ("chi1", chi_cost(1).id)):
        mu = ctx.constants(name).mu
        fit = _mean_slope(ctx, cid)
        rel = abs(fit.slope - mu) / mu
        ok &= rel <= 0.05
        det[name] = {"slope": fit.slope, "mu": mu, "rel_gap": rel}
    return CriterionResult(7, "mean slope", ok, det)


def c08(ctx: Context) -> CriterionResult:
    nu = ctx.constants("unit").nu
    fit = slope_fit([(math.log(sm.N), empirical_moments(sm)[1]) for sm in ctx.populations])
    rel = abs(fit.slope - nu) / nu
    return CriterionResult(8, "variance slope", rel <= 0.10,
                           {"slope": fit.slope, "nu": nu, "rel_gap": rel})


def c09(ctx: Context) -> CriterionResult:
    gc = ctx.constants("unit")
    ks = [standardized_ks(sm, gc.mu, gc.nu) for sm in ctx.populations]
    dec = all(b < a for a, b in zip(ks, ks[1:]))
    # diagnostics: any lattice law sits at least half its largest atom from a continuous cdf
    floor, mid = [], []
    for sm in ctx.populations:
        h = sm.histogram("unit")
        lN = math.log(sm.N)
        floor.append(float(h.max() / h.sum() / 2))
        mid.append(lattice_ks(h, gc.mu * lN, math.sqrt(gc.nu * lN), midpoint=True))
    return CriterionResult(9, "Gaussian law (KS)", ks[-1] <= 0.1 and dec,
                           {"N": [sm.N for sm in ctx.populations], "ks": ks,
                            "lattice_floor": floor, "ks_continuity_corrected": mid})


def c10(ctx: Context) -> CriterionResult:
    det = {}
    ok = True
    sms = ctx.populations[-2:]
    for w in (0.05, -0.05):
        gaps = []
        for sm in sms:
            emp = empirical_mgf(sm, w)
            pred = quasi_powers_prediction(w, sm.N, unit_cost(), ctx.cfg)
            gaps.append(abs(emp / pred - 1))
        ok &= max(gaps) <= 0.10 and gaps[-1] < gaps[0]
        det[repr(w)] = {"N": [sm.N for sm in sms], "rel_gaps": gaps}
    return CriterionResult(10, "quasi-powers", ok, det)


def c11(ctx: Context) -> CriterionResult:
    rows = []
    ok = True
    for k in (1, 2, 3):
        for s in (2.4, 3.0):
            for w in (0.0, 0.05):
                r = Yk(k, s, w, cutoff=10_000, cfg=ctx.cfg)
                good = r.gap <= 1e-8 and r.matrix_consistent
                ok &= good
                rows.append({"k": k, "s": s, "w": w, "gap": r.gap, "tail": r.tail,
                             "matrix_gap": r.matrix_gap, "matrix_err": r.matrix_err, "ok": good})
    return CriterionResult(11, "trace identity", ok, {"rows": rows})


def c12(ctx: Context) -> CriterionResult:
    d2 = hausdorff_dim(2, DIM_CONFIG)
    ce = cycle_expansion_dimension(2)
    Ms = (2, 5, 10, 20, 50, 100)
    sig = [d2.sigma_M] + [hausdorff_dim(M, DIM_CONFIG, check_doubling=False).sigma_M for M in Ms[1:]]
    mono = all(b > a for a, b in zip(sig, sig[1:]))
    rel = {M: abs(2 * (s - 1) - two_term_expansion(M)) / abs(2 * (s - 1))
           for M, s in zip(Ms, sig) if M in (10, 100)}
    ok = (abs(d2.sigma_M - SIGMA_2) <= 1e-5 and abs(ce - SIGMA_2) <= 1e-5
          and abs(ce - d2.sigma_M) <= 1e-5 and mono and rel[100] < rel[10])
    return CriterionResult(12, "Hausdorff dimension", ok,
                           {"sigma_2": d2.sigma_M, "cycle_expansion": ce, "drift": d2.drift,
                            "sigma_M": dict(zip(Ms, sig)), "two_term_rel_gap": rel})


def c13(ctx: Context) -> CriterionResult:
    st = log_epsilon_study(ctx.populations)
    rel = abs(st.slope.slope - 2) / 2
    ok = rel <= 0.05 and st.var_ratio <= 1.2
    return CriterionResult(13, "log eps concentration", ok,
                           {"slope": st.slope.slope, "slope_rel_gap_to_2": rel,
                            "var_ratio": st.var_ratio,
                            "means": [r.mean for r in st.rows], "vars": [r.var for r in st.rows],
                            "exponential_law_means": [r.exact_mean for r in st.rows]})


def c14(ctx: Context) -> CriterionResult:
    gc = ctx.constants("unit")
    sm = ctx.populations[-1]
    emp, pred = local_limit_window(sm, 0.0, gc.mu, gc.nu)
    emp2, pred2 = local_limit_window(sm, 0.0, gc.mu, gc.nu, L=2)
    total = int(lattice_window_counts(sm).sum())
    ratio = emp / pred
    ok = 0.5 <= ratio <= 2.0 and total == sm.count
    return CriterionResult(14, "local limit law", ok,
                           {"empirical": emp, "prediction": pred, "ratio": ratio,
                            "windows_total": total, "count": sm.count,
                            "span2_ratio": emp2 / pred2})


CRITERIA: Dict[int, Callable[[Context], CriterionResult]] = {
    1: c01, 2: c02, 3: c03, 4: c04, 5: c05, 6: c06, 7: c07,
    8: c08, 9: c09, 10: c10, 11: c11, 12: c12, 13: c13, 14: c14,
}
QUICK = (1, 3, 4, 5, 6, 11, 12)


def run_criterion(n: int, ctx: Context) -> CriterionResult:
    t = time.perf_counter()
    try:
        r = CRITERIA[n](ctx)
    except Exception as exc:  # a crash is a failure, reported not raised
        r = CriterionResult(n, CRITERIA[n].__name__, False, {"error": repr(exc)})
    r.seconds = time.perf_counter() - t
    return r


def run_acceptance(quick: bool = False, only: Optional[Sequence[int]] = None, threads: int = 1,
                   echo: Optional[Callable[[str], None]] = None) -> List[CriterionResult]:
    ctx = Context(quick=quick, threads=threads)
    todo = list(only) if only else list(QUICK if quick else CRITERIA)
    out = []
    for n in todo:
        r = run_criterion(n, ctx)
        if echo:
            echo(r.line())
        out.append(r)
    return out


def report(results: Sequence[CriterionResult]) -> dict:
    return {"criteria": [asdict(r) for r in results],
            "passed": sum(r.passed for r in results), "total": len(results)}
