"""Weighted Gauss transfer operator by Chebyshev collocation.

``H_{s,w} f(x) = sum_m e^{w c(m)} (m + x)^{-2s} f(1/(m + x))`` is discretized on
Chebyshev-Lobatto nodes of [0, 1].  Digits ``m <= M_t`` are summed
explicitly; for ``m > M_t`` each cardinal function is replaced by its Taylor
polynomial at 0 and the resulting sums are Hurwitz zeta values.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Dict, Optional, Tuple

import numpy as np
from numpy.polynomial import chebyshev as C
from scipy.special import bernoulli

from .costs import CostSpec, unit_cost
from .kernels import assemble

ENTROPY = math.pi ** 2 / (6.0 * math.log(2.0))
LOG2 = math.log(2.0)


class DomainError(ValueError):
    """Parameters outside the region where the operator series converges."""


class ConvergenceError(RuntimeError):
    def __init__(self, msg, residual=float("nan")):
        super().__init__(f"{msg} (residual {residual:.3e})")
        self.residual = residual


class PrecisionError(ArithmeticError):
    """A derivative or tail estimate is not trustworthy."""


# ---------------------------------------------------------------------------
# Hurwitz zeta
# ---------------------------------------------------------------------------

_BERN = bernoulli(40)


def hurwitz_zeta(z, q, terms: int = 12):
    """``sum_{n >= 0} (n + q)^{-z}`` for ``Re z > 1``, ``q > 0``; complex ``z`` allowed.

    Euler-Maclaurin after shifting ``q`` past ``30 + |z|``.  Broadcasts.
    """
    z, q = np.broadcast_arrays(np.asarray(z), np.asarray(q, dtype=float))
    if np.any(np.real(z) <= 1):
        raise DomainError("hurwitz_zeta needs Re z > 1")
    if np.any(q <= 0):
        raise DomainError("hurwitz_zeta needs q > 0")
    ctype = np.result_type(z.dtype, float)
    z = z.astype(ctype)
    q = q.copy()
    out = np.zeros(z.shape, ctype)
    shift = np.maximum(0, np.ceil(30.0 + np.abs(z) - q)).astype(np.int64)
    for j in range(int(shift.max(initial=0))):
        live = shift > j
        out[live] += np.exp(-z[live] * np.log(q[live] + j))
    q = q + shift
    lq = np.log(q)
    out += np.exp((1 - z) * lq) / (z - 1) + 0.5 * np.exp(-z * lq)
    rising = z.copy()
    fact = 1.0
    for j in range(1, terms + 1):
        fact *= (2 * j - 1) * (2 * j) if j > 1 else 2.0
        out += _BERN[2 * j] / fact * rising * np.exp(-(z + 2 * j - 1) * lq)
        rising = rising * (z + 2 * j - 1) * (z + 2 * j)
    return out


# ---------------------------------------------------------------------------
# collocation data
# ---------------------------------------------------------------------------


def chebyshev_nodes(D: int) -> Tuple[np.ndarray, np.ndarray]:
    """Chebyshev-Lobatto nodes on [0, 1] and their barycentric weights."""
    j = np.arange(D)
    x = 0.5 * (1.0 - np.cos(np.pi * j / (D - 1)))
    bw = (-1.0) ** j
    bw[0] *= 0.5
    bw[-1] *= 0.5
    return x, bw


def interpolate(x, bw, values, y):
    """Barycentric evaluation of the node interpolant at points ``y``."""
    y = np.atleast_1d(np.asarray(y, dtype=float))
    dif = y[:, None] - x[None, :]
    hit = dif == 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        t = bw / dif
        out = (t @ values) / t.sum(axis=1)
    rows = hit.any(axis=1)
    if rows.any():
        out[rows] = values[np.argmax(hit[rows], axis=1)]
    return out


_TAYLOR_CACHE: Dict[Tuple[int, int], np.ndarray] = {}


def cardinal_taylor(D: int, K: int) -> np.ndarray:
    """``tau[j, k] = L_j^{(k)}(0) / k!`` for the cardinal functions on the nodes."""
    key = (D, K)
    if key not in _TAYLOR_CACHE:
        x, _ = chebyshev_nodes(D)
        t = 2.0 * x - 1.0
        coef = C.chebfit(t, np.eye(D), D - 1)
        tau = np.zeros((D, K + 1))
        for k in range(K + 1):
            ck = C.chebder(coef, k, axis=0) if k else coef
            tau[:, k] = C.chebval(-1.0, ck) * 2.0 ** k / math.factorial(k) if ck.size else 0.0
        _TAYLOR_CACHE[key] = tau
    return _TAYLOR_CACHE[key]


# ---------------------------------------------------------------------------
# parameters and operator
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpectralConfig:
    D: int = 48
    M_t: int = 100_000
    tail_order: int = 30
    digit_cap: Optional[int] = None
    fd_step: float = 1e-3
    w_step: float = 1e-3
    tol: float = 1e-14
    max_iter: int = 5000
    use_numba: Optional[bool] = None


@dataclass(frozen=True)
class OperatorParams:
    s: complex
    w: complex
    cost: CostSpec
    order: int = 48
    digit_truncation: int = 100_000
    tail_order: int = 30
    digit_cap: Optional[int] = None

    def __post_init__(self):
        if self.order < 8:
            raise ValueError("collocation order D must be >= 8")
        if self.digit_cap is None and self.digit_truncation < 64:
            raise ValueError("digit truncation M_t must be >= 64")
        if self.digit_cap is not None and self.digit_cap < 1:
            raise ValueError("digit cap must be >= 1")
        if self.digit_cap is None and not domain_guard(self.s, self.w, self.cost, 0.5):
            raise DomainError(
                f"(s, w) = ({self.s}, {self.w}) is outside the convergence region "
                f"Re s - d |Re w| > 1/2")

    @classmethod
    def from_config(cls, s, w, cost, cfg: SpectralConfig) -> "OperatorParams":
        return cls(s=s, w=w, cost=cost, order=cfg.D, digit_truncation=cfg.M_t,
                   tail_order=cfg.tail_order, digit_cap=cfg.digit_cap)


@dataclass(frozen=True)
class DiscretizedOperator:
    matrix: np.ndarray
    nodes: np.ndarray
    weights: np.ndarray
    params: OperatorParams
    tail_terms: int = 0

    def apply(self, values):
        return self.matrix @ values


def domain_guard(s, w, cost: CostSpec, a: float) -> bool:
    """True iff ``Re s - d |Re w| > a`` with ``d`` the cost exponent."""
    return complex(s).real - cost.exponent * abs(complex(w).real) > a


def _tail_sums(x, s, w, cost: CostSpec, M_t: int, K: int):
    """``Z[b, i, k] = sum_{m > M_t} e^{w_b c(m)} (m + x_i)^{-2 s_b - k}``."""
    B = s.size
    ks = np.arange(K + 1)
    z = 2.0 * s[:, None, None] + ks[None, None, :]
    Z = np.zeros((B, x.size, K + 1), complex)
    for nblk, (lo, hi, v) in enumerate(cost.tail_blocks(M_t)):
        if nblk > 4000:
            raise ValueError("cost tail blocks did not converge; s too small for this cost")
        wt = np.exp(w * v)[:, None, None]
        if hi is not None and hi - lo < 64:
            m = np.arange(lo, hi + 1, dtype=float)
            blk = np.exp(-z[..., None] * np.log(m[None, None, None, :] + x[None, :, None, None])).sum(-1)
        else:
            blk = hurwitz_zeta(z, lo + x[None, :, None])
            if hi is not None:
                blk = blk - hurwitz_zeta(z, hi + 1 + x[None, :, None])
        contrib = wt * blk
        Z += contrib
        if hi is None:
            break
        mag = np.abs(contrib[..., 0]).max()
        if mag <= 1e-18 * max(np.abs(Z[..., 0]).max(), 1e-300) and nblk > 0:
            break
    return Z


def _assemble_batch(s, w, cost: CostSpec, cfg: SpectralConfig):
    """Collocation matrices for a batch of ``(s, w)`` pairs, shape ``(B, D, D)``."""
    s = np.atleast_1d(np.asarray(s))
    w = np.atleast_1d(np.asarray(w))
    s, w = np.broadcast_arrays(s, w)
    for sb, wb in zip(s, w):
        OperatorParams.from_config(complex(sb), complex(wb), cost, cfg)
    x, bw = chebyshev_nodes(cfg.D)
    cap = cfg.digit_cap
    m_hi = cfg.M_t if cap is None else cap
    cvals = cost.values(m_hi)
    is_c = np.iscomplexobj(s) or np.iscomplexobj(w)
    if not is_c:
        s = s.astype(float)
        w = w.astype(float)
    mats = assemble(x, bw, s, w, cvals, 1, m_hi, use_numba=cfg.use_numba)
    nterms = 0
    if cap is None:
        tau = cardinal_taylor(cfg.D, cfg.tail_order)
        scale = np.abs(tau).max(axis=0) * float(cfg.M_t) ** -np.arange(cfg.tail_order + 1)
        ok = np.nonzero(scale < 1e-18)[0]
        if ok.size == 0:
            raise ValueError(
                f"tail expansion does not converge at D={cfg.D}, M_t={cfg.M_t}; raise M_t")
        K = int(ok[0])
        Z = _tail_sums(x, s.astype(complex), w.astype(complex), cost, cfg.M_t, K)
        tail = np.einsum("bik,jk->bij", Z, tau[:, :K + 1])
        mats = mats + (tail if is_c else tail.real)
        nterms = K + 1
    return mats, x, bw, nterms


def build_operator(p: OperatorParams, use_numba=None) -> DiscretizedOperator:
    cfg = SpectralConfig(D=p.order, M_t=p.digit_truncation, tail_order=p.tail_order,
                         digit_cap=p.digit_cap, use_numba=use_numba)
    mats, x, bw, K = _assemble_batch(p.s, p.w, p.cost, cfg)
    A = mats[0]
    if not np.all(np.isfinite(A)):
        raise DomainError("operator matrix is not finite")
    return DiscretizedOperator(matrix=A, nodes=x, weights=bw, params=p, tail_terms=K)


# ---------------------------------------------------------------------------
# eigenproblem
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EigenSolution:
    lam: complex
    right_values: np.ndarray
    left_values: np.ndarray
    residual: float
    iterations: int = 0

    @property
    def projector(self) -> np.ndarray:
        return np.outer(self.right_values, self.left_values)


def _power(A, tol, max_iter):
    D = A.shape[0]
    f = np.ones(D, A.dtype)
    lam = 0.0
    best = (np.inf, None, None)
    stall = 0
    for it in range(1, max_iter + 1):
        g = A @ f
        i0 = int(np.argmax(np.abs(g)))
        lam = g[i0] / f[i0] if f[i0] != 0 else g[i0]
        f = g / g[i0]
        res = np.abs(A @ f - lam * f).max() / max(abs(lam), 1e-300)
        if res < best[0]:
            best = (res, lam, f)
            stall = 0
        else:
            stall += 1
        if res <= tol or stall > 50:
            break
    res, lam, f = best
    # Rayleigh-shifted inverse iteration polish
    for _ in range(3):
        try:
            y = np.linalg.solve(A - lam * np.eye(D), f)
        except np.linalg.LinAlgError:
            break
        y = y / y[np.argmax(np.abs(y))]
        g = A @ y
        new_lam = (np.vdot(y, g) / np.vdot(y, y))
        new_res = np.abs(g - new_lam * y).max() / max(abs(new_lam), 1e-300)
        if not new_res < res:
            break
        lam, f, res = new_lam, y, new_res
    return lam, f, res, it


def dominant_eigen(op, tol: float = 1e-14, max_iter: int = 5000) -> EigenSolution:
    """Dominant eigenpair by power iteration from the all-ones vector.

    The left vector comes from the transpose.  Normalized so that
    ``mu[1] = 1`` and ``mu[f] = 1``.
    """
    A = op.matrix if isinstance(op, DiscretizedOperator) else np.asarray(op)
    lam, f, res, it = _power(A, tol, max_iter)
    if not res <= max(1e3 * tol, 1e-10):
        raise ConvergenceError("power iteration did not converge", res)
    lam_l, l, res_l, _ = _power(A.T, tol, max_iter)
    if abs(lam_l - lam) > 1e-8 * max(1.0, abs(lam)):
        raise ConvergenceError("left and right eigenvalues disagree", abs(lam_l - lam))
    l = l / l.sum()
    f = f / (l @ f)
    if not np.iscomplexobj(A):
        lam = float(np.real(lam))
    return EigenSolution(lam=lam, right_values=f, left_values=l,
                         residual=float(max(res, res_l)), iterations=it)


def second_eigenvalue(op, sol: Optional[EigenSolution] = None) -> complex:
    """Largest eigenvalue (in modulus) of the deflated matrix; a spectral-gap diagnostic."""
    A = op.matrix if isinstance(op, DiscretizedOperator) else np.asarray(op)
    sol = sol or dominant_eigen(A)
    Ad = A - sol.lam * np.outer(sol.right_values, sol.left_values)
    return complex(_power(Ad, 1e-13, 20000)[0])


# ---------------------------------------------------------------------------
# lambda and its derivatives
# ---------------------------------------------------------------------------

_LAMBDA_CACHE: Dict[tuple, complex] = {}


def _key(s, w, cost, cfg):
    return (complex(s), complex(w), cost, replace(cfg, use_numba=None))


def lambda_batch(s, w, cost: CostSpec, cfg: SpectralConfig = SpectralConfig()) -> np.ndarray:
    """Dominant eigenvalues for paired arrays ``s``, ``w``; cached per point."""
    s, w = np.broadcast_arrays(np.atleast_1d(np.asarray(s)), np.atleast_1d(np.asarray(w)))
    keys = [_key(a, b, cost, cfg) for a, b in zip(s, w)]
    todo = [i for i, k in enumerate(keys) if k not in _LAMBDA_CACHE]
    if todo:
        mats, *_ = _assemble_batch(s[todo], w[todo], cost, cfg)
        for i, A in zip(todo, mats):
            _LAMBDA_CACHE[keys[i]] = dominant_eigen(A, cfg.tol, cfg.max_iter).lam
    out = np.array([_LAMBDA_CACHE[k] for k in keys])
    if not (np.iscomplexobj(s) or np.iscomplexobj(w)):
        out = out.real.astype(float)
    return out


def lambda_(s, w=0.0, cost: Optional[CostSpec] = None, cfg: SpectralConfig = SpectralConfig()):
    """Dominant eigenvalue ``lambda(s, w)``."""
    return lambda_batch(s, w, cost or unit_cost(), cfg)[0]


def clear_cache() -> None:
    _LAMBDA_CACHE.clear()


@dataclass(frozen=True)
class LambdaPartials:
    lam: float
    ds: complex
    dw: complex
    dss: complex
    dww: complex
    err_ds: float
    err_dw: float
    err_dss: float
    err_dww: float
    step: float


def _richardson(f_h, f_h2, order=2):
    r = (2 ** order * f_h2 - f_h) / (2 ** order - 1)
    return r, abs(r - f_h2)


def lambda_partials(s, w, cost: CostSpec, cfg: SpectralConfig = SpectralConfig(),
                    step: Optional[float] = None, check: bool = True) -> LambdaPartials:
    """First and second partial derivatives of ``lambda`` at ``(s, w)``.

    Central differences with steps ``h`` and ``h/2`` combined by Richardson.
    """
    h = cfg.fd_step if step is None else step
    o = np.array([0.0, h, -h, h / 2, -h / 2])
    S = np.concatenate([s + o, np.full(4, s)])
    W = np.concatenate([np.full(5, w), w + o[1:]])
    v = lambda_batch(S, W, cost, cfg)
    lam = v[0]
    ds, eds = _richardson((v[1] - v[2]) / (2 * h), (v[3] - v[4]) / h)
    dss, edss = _richardson((v[1] - 2 * lam + v[2]) / h ** 2, (v[3] - 2 * lam + v[4]) / (h / 2) ** 2)
    dw, edw = _richardson((v[5] - v[6]) / (2 * h), (v[7] - v[8]) / h)
    dww, edww = _richardson((v[5] - 2 * lam + v[6]) / h ** 2, (v[7] - 2 * lam + v[8]) / (h / 2) ** 2)
    if check:
        for val, err in ((ds, eds), (dw, edw)):
            if err > 1e-4 * max(1.0, abs(val)):
                raise PrecisionError(f"Richardson pair inconsistent (error {err:.2e})")
    return LambdaPartials(lam, ds, dw, dss, dww, eds, edw, edss, edww, h)


def lambda_ds_stencil4(s, w, cost: CostSpec, cfg: SpectralConfig = SpectralConfig(), h=None):
    """Five-point (four evaluation) first derivative in ``s`` at steps ``h, 2h``."""
    h = cfg.fd_step if h is None else h
    v = lambda_batch(s + np.array([2 * h, h, -h, -2 * h]), w, cost, cfg)
    return (-v[0] + 8 * v[1] - 8 * v[2] + v[3]) / (12 * h)


def lambda_dw_stencil4(s, w, cost: CostSpec, cfg: SpectralConfig = SpectralConfig(), h=None):
    h = cfg.w_step if h is None else h
    v = lambda_batch(s, w + np.array([2 * h, h, -h, -2 * h]), cost, cfg)
    return (-v[0] + 8 * v[1] - 8 * v[2] + v[3]) / (12 * h)


def lambda_ds(s, w, cost, cfg, h=1e-4):
    """Richardson ``d lambda / d s`` (used inside Newton and for V)."""
    s = np.atleast_1d(np.asarray(s))
    w = np.atleast_1d(np.asarray(w))
    s, w = np.broadcast_arrays(s, w)
    n = s.size
    o = np.array([h, -h, h / 2, -h / 2])
    v = lambda_batch((s[:, None] + o).ravel(), np.repeat(w, 4), cost, cfg).reshape(n, 4)
    return (4 * (v[:, 2] - v[:, 3]) / h - (v[:, 0] - v[:, 1]) / (2 * h)) / 3


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EntropyReport:
    closed: float
    spectral: float
    discrepancy: float


def entropy(cfg: SpectralConfig = SpectralConfig()) -> EntropyReport:
    sp = -lambda_partials(1.0, 0.0, unit_cost(), cfg).ds
    return EntropyReport(ENTROPY, float(np.real(sp)), float(abs(sp - ENTROPY)))


def _gauss_tail(a: float) -> float:
    """Gauss measure of ``{digit >= a}``: ``log2((a + 1) / a)``."""
    return math.log1p(1.0 / a) / LOG2


def mean_cost_closed_form(cost: CostSpec, m_cap: int = 1 << 62, tol: float = 1e-14) -> float:
    """``E[c]`` under the Gauss density, summed exactly by constant-cost blocks.

    ``sum_{m=lo}^{hi} log2((m+1)^2 / (m (m+2)))`` telescopes to
    ``log2((lo+1)/lo) - log2((hi+2)/(hi+1))``.
    """
    if cost.kind == "unit":
        return 1.0
    if cost.kind == "chi":
        n = cost.n
        return math.log((n + 1) ** 2 / (n * (n + 2))) / LOG2
    total = 0.0
    for lo, hi, v in cost.tail_blocks(0):
        if lo > m_cap:
            # moderate growth bounds the remainder
            bound = (cost.A * (math.log(lo) + 1.0) + cost.B) * _gauss_tail(lo)
            if bound > tol:
                raise PrecisionError(f"mean-cost tail {bound:.2e} exceeds tolerance")
            break
        if hi is None:
            total += v * _gauss_tail(lo)
            break
        total += v * (_gauss_tail(lo) - _gauss_tail(hi + 1))
    return total


# ---------------------------------------------------------------------------
# sigma(w) and the Gaussian constants
# ---------------------------------------------------------------------------


def sigma_batch(ws, cost: CostSpec, cfg: SpectralConfig = SpectralConfig(),
                s0=None, tol: float = 1e-13, max_steps: int = 30) -> np.ndarray:
    """Solve ``lambda(sigma, w) = 1`` for every ``w`` by simultaneous Newton steps."""
    ws = np.atleast_1d(np.asarray(ws))
    cplx = np.iscomplexobj(ws)
    if s0 is None:
        s0 = 1.0 if cfg.digit_cap is None else None
    if s0 is None:
        raise ValueError("capped operators need an anchor s0")
    sig = np.full(ws.shape, s0, complex if cplx else float)
    res = np.full(ws.shape, np.inf)
    for _ in range(max_steps):
        lam = lambda_batch(sig, ws, cost, cfg)
        res = np.abs(lam - 1.0)
        if np.all(res <= tol):
            return sig
        d = lambda_ds(sig, ws, cost, cfg)
        step = (lam - 1.0) / d
        if np.any(np.abs(step) > 0.25):
            raise ConvergenceError("Newton step for sigma(w) too large; continue in w", float(res.max()))
        sig = sig - np.where(res <= tol, 0.0, step)
    raise ConvergenceError("sigma(w) Newton did not converge", float(res.max()))


def sigma_of_w(w, cost: Optional[CostSpec] = None, cfg: SpectralConfig = SpectralConfig(),
               w_max: float = 0.5, n_cont: int = 1):
    """``sigma(w)`` with ``lambda(sigma(w), w) = 1`` and ``sigma(0) = 1``."""
    cost = cost or unit_cost()
    if abs(w) > w_max:
        raise DomainError(f"|w| = {abs(w)} beyond the certified neighborhood {w_max}")
    s = 1.0
    for j in range(1, n_cont + 1):
        s = sigma_batch([w * j / n_cont], cost, cfg, s0=s)[0]
    return s


@dataclass
class GaussianConstants:
    mu: float
    nu: float
    mu1: float
    nu1: float
    sigma_samples: Dict[float, float]
    diagnostics: Dict[str, object] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "mu": self.mu, "nu": self.nu, "mu1": self.mu1, "nu1": self.nu1,
            "sigma_samples": {repr(k): v for k, v in sorted(self.sigma_samples.items())},
            "diagnostics": self.diagnostics,
        }


def _constants(cost: CostSpec, cfg: SpectralConfig, s0: float) -> GaussianConstants:
    h = cfg.w_step
    ws = np.array([h, -h, h / 2, -h / 2])
    sig = sigma_batch(ws, cost, cfg, s0=s0)
    d1, e1 = _richardson((sig[0] - sig[1]) / (2 * h), (sig[2] - sig[3]) / h)
    d2, e2 = _richardson((sig[0] - 2 * s0 + sig[1]) / h ** 2,
                         (sig[2] - 2 * s0 + sig[3]) / (h / 2) ** 2)
    lds = lambda_ds(np.concatenate([[s0], sig]), np.concatenate([[0.0], ws]), cost, cfg)
    V = np.log(lds[0] / lds[1:]) - np.log(sig / s0)
    v1, ev1 = _richardson((V[0] - V[1]) / (2 * h), (V[2] - V[3]) / h)
    v2, ev2 = _richardson((V[0] + V[1]) / h ** 2, (V[2] + V[3]) / (h / 2) ** 2)
    mu, nu = 2 * d1, 2 * d2
    part = lambda_partials(s0, 0.0, cost, cfg)
    implicit = -part.dw / part.ds
    diag = {
        "D": cfg.D, "M_t": cfg.M_t, "digit_cap": cfg.digit_cap,
        "steps": [h, h / 2], "richardson_order": 2,
        "err_mu": 2 * e1, "err_nu": 2 * e2, "err_mu1": ev1, "err_nu1": ev2,
        "sigma_prime_implicit": float(implicit), "lambda_s": float(part.ds),
        "residuals": [float(abs(x - 1)) for x in lambda_batch(sig, ws, cost, cfg)],
    }
    if nu <= 2 * e2 and cost.integer_valued:
        diag["degenerate"] = True
    samples = {0.0: float(s0)}
    samples.update({float(w): float(sv) for w, sv in zip(ws, sig)})
    return GaussianConstants(float(mu), float(nu), float(v1), float(v2), samples, diag)


def gaussian_constants(cost: CostSpec, cfg: SpectralConfig = SpectralConfig()) -> GaussianConstants:
    """``mu = U'(0)``, ``nu = U''(0)``, ``mu1 = V'(0)``, ``nu1 = V''(0)`` with ``U = 2(sigma - 1)``."""
    if cfg.digit_cap is not None:
        raise ValueError("use constrained.constrained_constants for capped operators")
    gc = _constants(cost, cfg, 1.0)
    gc.diagnostics["entropy_closed"] = ENTROPY
    gc.diagnostics["mean_cost"] = mean_cost_closed_form(cost)
    gc.diagnostics["mu_closed"] = 2 * gc.diagnostics["mean_cost"] / ENTROPY
    return gc
