"""Transfer-operator traces and the Dirichlet series built from them.

A component operator ``H_[h]`` has trace
``alpha(h)^{2s} e^{w c(h)} / (1 - (-1)^{|h|} alpha(h)^2)``, so that

    Y_k(s, w) = Tr H^k_{s/2, w} - (-1)^k Tr H^k_{s/2 + 1, w}.

Word sums over ``H^k`` are truncated by the product of the digits (every word
with ``m_1 ... m_k <= X`` is kept).  Since the continuant dominates that
product, ``alpha(h) <= prod m_i^{-1}`` gives a rigorous majorant for the
discarded words.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np
from scipy.special import zeta

from .cfcore import size_triple
from .costs import PHI, CostSpec, unit_cost
from .kernels import necklace_records
from .orbits import epsilon_bound
from .spectral import (DomainError, SpectralConfig, _assemble_batch, lambda_ds,
                       sigma_of_w)


@dataclass(frozen=True)
class SeriesTruncation:
    k_max: int
    digit_cutoff: int
    tail_estimate: float

    def __post_init__(self):
        if self.k_max < 1:
            raise ValueError("k_max must be >= 1")
        if not math.isfinite(self.tail_estimate):
            raise ValueError("tail estimate must be finite")


@dataclass(frozen=True)
class TraceResult:
    value: complex
    tail: float
    n_words: int
    cutoff: int


@dataclass(frozen=True)
class YkResult:
    k: int
    s: complex
    w: complex
    direct: complex
    trace_form: complex
    gap: float
    tail: float
    matrix_form: Optional[complex] = None
    matrix_gap: Optional[float] = None
    matrix_err: Optional[float] = None

    @property
    def matrix_consistent(self) -> Optional[bool]:
        if self.matrix_gap is None:
            return None
        return self.matrix_gap <= self.tail + self.matrix_err


class IdentityViolation(AssertionError):
    pass


def trace_component(word: Sequence[int], s, w, cost: CostSpec) -> complex:
    """``Tr H_[h] = alpha^{2s} e^{w c(h)} / (1 - (-1)^{|h|} alpha^2)``."""
    st = size_triple(word)
    a = st.alpha
    c = sum(cost(int(m)) for m in word)
    val = a ** (2 * s) * np.exp(w * c) / (1.0 - (-1) ** len(word) * a * a)
    return complex(val)


def words_by_product(k: int, X: int) -> np.ndarray:
    """All words of length ``k`` whose digit product is ``<= X``, shape ``(n, k)``."""
    if k < 1 or X < 1:
        raise ValueError("need k >= 1 and X >= 1")
    words = np.arange(1, X + 1, dtype=np.int64)[:, None]
    prod = words[:, 0].copy()
    for _ in range(k - 1):
        nchild = X // prod
        parent = np.repeat(np.arange(words.shape[0]), nchild)
        start = np.repeat(np.cumsum(nchild) - nchild, nchild)
        m = np.arange(parent.size) - start + 1
        words = np.column_stack([words[parent], m])
        prod = prod[parent] * m
    return words


def _word_alpha(words: np.ndarray) -> np.ndarray:
    a = np.ones(words.shape[0])
    b = np.zeros(words.shape[0])
    c = np.zeros(words.shape[0])
    d = np.ones(words.shape[0])
    for col in words.T:
        a, b = b, a + col * b
        c, d = d, c + col * d
    t = a + d
    det = (-1.0) ** words.shape[1]
    return 2.0 / (t + np.sqrt(t * t - 4 * det))


def _majorant(words, k, s, w, cost: CostSpec):
    """Rigorous tail bound for the words missing from ``words`` (weights ``alpha^s e^{wc}``)."""
    sig = complex(s).real - cost.A * abs(complex(w).real)
    if sig <= 1:
        raise DomainError("word-sum majorant needs Re s - A |Re w| > 1")
    g = math.exp(abs(complex(w).real) * cost.B)
    total = (g * zeta(sig)) ** k
    part = (g ** k * np.prod(words.astype(float), axis=1) ** -sig).sum()
    # plus the rounding of the kept sum (n u sum|term|, dominated by ``part``)
    return max(float(total - part), 0.0) + words.shape[0] * np.finfo(float).eps * float(part)


def _word_sums(k, s, w, cost: CostSpec, X: int):
    words = words_by_product(k, X)
    alpha = _word_alpha(words)
    cv = cost.values(X)
    c = cv[words].sum(axis=1)
    return words, alpha, c


def trace_Hk_direct(k: int, s, w, cost: Optional[CostSpec] = None, cutoff: int = 10_000) -> TraceResult:
    """``Tr H^k_{s,w}`` as the sum of component traces over words with digit product <= cutoff."""
    cost = cost or unit_cost()
    words, alpha, c = _word_sums(k, s, w, cost, cutoff)
    sgn = (-1) ** k
    val = (np.exp(2 * s * np.log(alpha) + w * c) / (1 - sgn * alpha ** 2)).sum()
    den = 1 - PHI ** -4 if k % 2 == 0 else 1.0
    tail = _majorant(words, k, 2 * s, w, cost) / den
    return TraceResult(complex(val), tail, words.shape[0], cutoff)


@dataclass(frozen=True)
class MatrixTrace:
    value: complex
    err: float
    n_eigs: int


def _stable_eigs(s, w, cost, cfg, rel=1e-7):
    """Eigenvalues of the order-D matrix reproduced by the order-2D matrix.

    Collocation on [0, 1] also produces eigenvalues attached to the
    accumulation point 0 of the branch images; they drift like 1/D and are
    dropped here.
    """
    e1 = np.linalg.eigvals(_assemble_batch(s, w, cost, cfg)[0][0])
    e2 = np.linalg.eigvals(_assemble_batch(s, w, cost, replace(cfg, D=2 * cfg.D))[0][0])
    e1 = e1[np.argsort(-np.abs(e1))]
    scale = abs(e1[0])
    keep = []
    for lam in e1:
        if np.min(np.abs(e2 - lam)) <= rel * scale:
            keep.append(lam)
        elif abs(lam) < 1e-3 * scale and len(keep) >= 2:
            break
    return np.array(keep)


def trace_Hk_matrix(k: int, s, w, cost: Optional[CostSpec] = None,
                    cfg: SpectralConfig = SpectralConfig(), method: str = "stable") -> MatrixTrace:
    """``Tr H^k`` from the collocation matrix.

    ``raw`` returns ``Tr A^k`` (converges only like 1/D).  ``stable`` sums
    ``lambda^k`` over the eigenvalues confirmed by doubling D and estimates the
    dropped part geometrically.
    """
    cost = cost or unit_cost()
    if method == "raw":
        A = _assemble_batch(s, w, cost, cfg)[0][0]
        return MatrixTrace(complex(np.trace(np.linalg.matrix_power(A, k))), float("nan"), A.shape[0])
    if method != "stable":
        raise ValueError(f"unknown method {method!r}")
    ev = _stable_eigs(s, w, cost, cfg)
    q = min(abs(ev[-1] / ev[-2]), 0.9) if ev.size >= 2 else 0.9
    nxt = abs(ev[-1]) * q
    err = nxt ** k / (1 - q ** k)
    return MatrixTrace(complex((ev ** k).sum()), float(err), int(ev.size))


def Yk(k: int, s, w=0.0, cost: Optional[CostSpec] = None, cutoff: int = 10_000,
       cfg: Optional[SpectralConfig] = None, tol: Optional[float] = None) -> YkResult:
    """``Y_k(s, w)`` directly and through the trace identity.

    ``gap`` compares the two forms on the same truncated word set, so it only
    reflects rounding.  With ``cfg`` set the trace form is also computed from
    collocation matrices, which is independent of the word sum; that gap must
    stay below ``tail`` plus the collocation error.
    """
    cost = cost or unit_cost()
    words, alpha, c = _word_sums(k, s, w, cost, cutoff)
    la = np.log(alpha)
    sgn = (-1) ** k
    direct = np.exp(s * la + w * c).sum()
    den = 1 - sgn * alpha ** 2
    t1 = (np.exp(s * la + w * c) / den).sum()
    t2 = (np.exp((s + 2) * la + w * c) / den).sum()
    trace_form = t1 - sgn * t2
    tail = _majorant(words, k, s, w, cost)
    gap = float(abs(direct - trace_form))
    lim = 1e-12 * max(1.0, abs(direct)) if tol is None else tol
    if gap > lim:
        raise IdentityViolation(f"trace identity gap {gap:.3e} for k={k}, s={s}, w={w}")
    mform = mgap = merr = None
    if cfg is not None:
        a = trace_Hk_matrix(k, s / 2, w, cost, cfg)
        b = trace_Hk_matrix(k, s / 2 + 1, w, cost, cfg)
        mform = a.value - sgn * b.value
        merr = a.err + b.err
        mgap = float(abs(mform - direct))
    return YkResult(k, s, w, complex(direct), complex(trace_form), gap, tail, mform, mgap, merr)


# ---------------------------------------------------------------------------
# P and Z
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SeriesResult:
    value: complex
    tail_estimate: float
    N_cut: float
    terms: int


def _records(N_cut: float, cost: CostSpec, use_numba=None):
    bound = epsilon_bound(N_cut)
    cap = int(math.floor(bound))
    p, T, c, _ = necklace_records(bound, cap, cost.values(cap), use_numba)
    T = T.astype(float)
    le = np.log(0.5 * (T + np.sqrt(T * T - 4.0)))
    return p, le, c[:, 0]


def _check_s(s):
    if complex(s).real <= 2:
        raise DomainError("P and Z are only summed for Re s > 2")


def _series_tail(s, w, cost, N_cut, cfg):
    """Tauberian estimate ``v(w) N^{2 sigma - s} / (s - 2 sigma)`` of the omitted part."""
    wr = float(np.real(w))
    sig = float(np.real(sigma_of_w(wr, cost, cfg)))
    v = -1.0 / float(lambda_ds(sig, wr, cost, cfg)[0].real)
    sr = complex(s).real
    return v * N_cut ** (2 * sig - sr) / (sr - 2 * sig)


def P_partial(s, w=0.0, cost: Optional[CostSpec] = None, N_cut: float = 1e3,
              cfg: Optional[SpectralConfig] = None, use_numba=None) -> SeriesResult:
    """``sum e^{wC(x)} eps(x)^{-s}`` over rqis with ``eps <= N_cut``."""
    _check_s(s)
    cost = cost or unit_cost()
    p, le, c = _records(N_cut, cost, use_numba)
    val = (p * np.exp(w * c - s * le)).sum()
    tail = _series_tail(s, w, cost, N_cut, cfg or SpectralConfig(D=32, M_t=4000))
    return SeriesResult(complex(val), tail, N_cut, int(p.sum()))


def _power_terms(p, le, c, s, w, N_cut):
    """Contributions of the proper powers ``u^j`` (j >= 2) with ``eps(u^j) <= N_cut``."""
    lN = math.log(N_cut) + 1e-12
    total = 0.0
    n = 0
    odd = p % 2 == 1
    j = 2
    while True:
        e = np.where(odd & (j % 2 == 0), j / 2.0, float(j))
        lej = e * le
        keep = lej <= lN
        if not keep.any():
            break
        total = total + (p[keep] * np.exp(j * w * c[keep] - s * lej[keep])).sum()
        n += int(p[keep].sum())
        j += 1
    return total, n


def Z_partial(s, w=0.0, cost: Optional[CostSpec] = None, N_cut: float = 1e3,
              cfg: Optional[SpectralConfig] = None, use_numba=None) -> SeriesResult:
    """``sum e^{w c(h)} eps(h)^{-s}`` over all words ``h`` with ``eps(h) <= N_cut``."""
    _check_s(s)
    cost = cost or unit_cost()
    p, le, c = _records(N_cut, cost, use_numba)
    val = (p * np.exp(w * c - s * le)).sum()
    extra, n = _power_terms(p, le, c, s, w, N_cut)
    tail = _series_tail(s, w, cost, N_cut, cfg or SpectralConfig(D=32, M_t=4000))
    return SeriesResult(complex(val + extra), tail, N_cut, int(p.sum()) + n)


# ---------------------------------------------------------------------------
# pole, residue and quasi-powers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PoleData:
    w: complex
    s_w: complex
    residue: complex
    sigma: complex
    lambda_residual: float


def pole_and_residue(w, cost: Optional[CostSpec] = None,
                     cfg: SpectralConfig = SpectralConfig()) -> PoleData:
    """Pole ``s_w = 2 sigma(w)`` of ``P(s, w)`` and ``v(w) = -1 / lambda_s(sigma(w), w)``."""
    from .spectral import lambda_batch
    cost = cost or unit_cost()
    sig = sigma_of_w(w, cost, cfg)
    lam = lambda_batch(sig, w, cost, cfg)[0]
    v = -1.0 / lambda_ds(sig, w, cost, cfg)[0]
    if not np.isreal(w) or np.iscomplexobj(sig):
        return PoleData(w, 2 * sig, complex(v), sig, float(abs(lam - 1)))
    return PoleData(w, float(2 * sig), float(np.real(v)), float(sig), float(abs(lam - 1)))


def quasi_powers_prediction(w: float, N: float, cost: Optional[CostSpec] = None,
                            cfg: SpectralConfig = SpectralConfig()) -> float:
    """``v(w) / (sigma(w) v(0)) N^{2 (sigma(w) - 1)}``, the predicted ``E_N[e^{wC}]``."""
    if N <= 1:
        raise ValueError("N must exceed 1")
    cost = cost or unit_cost()
    if w == 0:
        return 1.0
    pw = pole_and_residue(w, cost, cfg)
    p0 = pole_and_residue(0.0, cost, cfg)
    return float(pw.residue / (pw.sigma * p0.residue) * N ** (2 * (pw.sigma - 1)))


def quasi_inverses(A: np.ndarray):
    """Matrix versions of ``E = H^2 (I - H^2)^{-1}`` and ``O = H (I - H^2)^{-1}``."""
    A2 = A @ A
    R = np.linalg.inv(np.eye(A.shape[0]) - A2)
    return A2 @ R, A @ R


AUDIT_COLUMNS = ("k", "s_re", "s_im", "w", "direct", "trace_form", "gap", "tail")


def write_trace_audit(path, results: Sequence[YkResult]) -> None:
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(AUDIT_COLUMNS)
        for r in results:
            wr.writerow([r.k, repr(complex(r.s).real), repr(complex(r.s).imag),
                         repr(float(np.real(r.w))), repr(r.direct.real),
                         repr(r.trace_form.real), repr(r.gap), repr(r.tail)])
