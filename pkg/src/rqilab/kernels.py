"""Hot loops: the necklace scan and collocation assembly.

Each kernel has a numba version and a numpy version with identical outputs.
``USE_NUMBA`` (see ``_accel``) picks the default; both stay importable so the
benchmark and the tests can compare them.
"""
from __future__ import annotations

import math

import numpy as np

from ._accel import USE_NUMBA, njit

# ---------------------------------------------------------------------------
# necklace scan
# ---------------------------------------------------------------------------


def max_period(bound: float) -> int:
    """Longest word whose continuant can stay <= bound (all-ones words are minimal)."""
    f0, f1, n = 1, 1, 0
    # continuant of 1^n is F_{n+1}
    while f1 <= bound:
        f0, f1 = f1, f0 + f1
        n += 1
    return max(n, 1)


class ScanResult:
    """Raw accumulators of one scan, one slot per bound (not yet cumulative)."""

    FIELDS = ("counts", "necklaces", "csum", "csq", "mgf", "dirichlet",
              "logeps", "hist", "maxdig")

    def __init__(self, G, K, W, S, H, cap):
        self.counts = np.zeros(G, np.int64)
        self.necklaces = np.zeros(G, np.int64)
        self.csum = np.zeros((G, K))
        self.csq = np.zeros((G, K))
        self.mgf = np.zeros((G, K, W))
        self.dirichlet = np.zeros((G, K, W, S))
        self.logeps = np.zeros((G, 2))
        self.hist = np.zeros((G, K, H), np.int64)
        self.maxdig = np.zeros((G, cap + 1), np.int64)

    def __iadd__(self, other):
        for f in self.FIELDS:
            getattr(self, f).__iadd__(getattr(other, f))
        return self


@njit(cache=True, nogil=True)
def _scan_nb(bounds, cap, first_lo, first_hi, cost_tab, w_grid, s_grid, maxlen,
             counts, necks, csum, csq, mgf, dirich, logeps, hist, maxdig):
    G = bounds.shape[0]
    K = cost_tab.shape[0]
    W = w_grid.shape[0]
    S = s_grid.shape[0]
    H = hist.shape[2]
    bmax = bounds[G - 1]
    n = maxlen + 2
    a = np.zeros(n, np.int64)
    m11 = np.zeros(n, np.int64)
    m12 = np.zeros(n, np.int64)
    m21 = np.zeros(n, np.int64)
    m22 = np.zeros(n, np.int64)
    m11[0] = 1
    m22[0] = 1
    lp = np.zeros(n, np.int64)
    cs = np.zeros((K, n))
    md = np.zeros(n, np.int64)
    depth = 1
    a[1] = first_lo
    while depth >= 1:
        m = a[depth]
        p21 = m21[depth - 1]
        p22 = m22[depth - 1]
        hi = cap if depth > 1 else first_hi
        q = p21 + m * p22
        if m > hi or q > bmax:
            depth -= 1
            if depth >= 1:
                a[depth] += 1
            continue
        p11 = m11[depth - 1]
        p12 = m12[depth - 1]
        m11[depth] = p12
        m12[depth] = p11 + m * p12
        m21[depth] = p22
        m22[depth] = q
        if depth > 1 and m == a[depth - lp[depth - 1]]:
            lp[depth] = lp[depth - 1]
        else:
            lp[depth] = depth
        for k in range(K):
            cs[k, depth] = cs[k, depth - 1] + cost_tab[k, m]
        md[depth] = md[depth - 1] if md[depth - 1] > m else m
        if lp[depth] == depth:
            t = m11[depth] + m22[depth]
            T = t if depth % 2 == 0 else t * t + 2
            if T <= bmax:
                g = 0
                while T > bounds[g]:
                    g += 1
                p = depth
                eps = 0.5 * (T + math.sqrt(float(T) * T - 4.0))
                le = math.log(eps)
                counts[g] += p
                necks[g] += 1
                logeps[g, 0] += p * le
                logeps[g, 1] += p * le * le
                maxdig[g, md[depth]] += p
                for k in range(K):
                    c = cs[k, depth]
                    csum[g, k] += p * c
                    csq[g, k] += p * c * c
                    ic = int(c + 0.5)
                    if ic < H:
                        hist[g, k, ic] += p
                    for iw in range(W):
                        e = p * math.exp(w_grid[iw] * c)
                        mgf[g, k, iw] += e
                        for js in range(S):
                            dirich[g, k, iw, js] += e * math.exp(-s_grid[js] * le)
        if depth < maxlen:
            depth += 1
            a[depth] = a[depth - lp[depth - 1]]
        else:
            a[depth] += 1


def _scan_np(bounds, cap, first_lo, first_hi, cost_tab, w_grid, s_grid, maxlen,
             res: ScanResult, emit=None):
    """Level-synchronous version of the same prenecklace search.

    With ``emit`` set, accepted necklaces are passed as
    ``emit(period, T, costs, maxdigit)`` instead of being accumulated.
    """
    G = bounds.shape[0]
    K = cost_tab.shape[0]
    H = res.hist.shape[2]
    bmax = bounds[-1]
    top = min(first_hi, cap, int(math.floor(bmax)))
    m = np.arange(first_lo, top + 1, dtype=np.int64)
    if m.size == 0:
        return
    words = np.zeros((m.size, maxlen), np.int64)
    words[:, 0] = m
    P11 = np.zeros(m.size, np.int64)
    P12 = np.ones(m.size, np.int64)
    P21 = np.ones(m.size, np.int64)
    P22 = m.copy()
    lp = np.ones(m.size, np.int64)
    cs = cost_tab[:, m].T.copy()
    md = m.copy()
    depth = 1
    while True:
        lyn = lp == depth
        if lyn.any():
            t = P11[lyn] + P22[lyn]
            T = t if depth % 2 == 0 else t * t + 2
            ok = T <= bmax
            if ok.any() and emit is not None:
                emit(depth, T[ok], cs[lyn][ok], md[lyn][ok])
            elif ok.any():
                T = T[ok].astype(float)
                g = np.searchsorted(bounds, T, side="left")
                eps = 0.5 * (T + np.sqrt(T * T - 4.0))
                le = np.log(eps)
                c = cs[lyn][ok]
                p = float(depth)
                res.counts += np.bincount(g, minlength=G) * depth
                res.necklaces += np.bincount(g, minlength=G)
                res.logeps[:, 0] += p * np.bincount(g, le, minlength=G)
                res.logeps[:, 1] += p * np.bincount(g, le * le, minlength=G)
                np.add.at(res.maxdig, (g, md[lyn][ok]), depth)
                for k in range(K):
                    ck = c[:, k]
                    res.csum[:, k] += p * np.bincount(g, ck, minlength=G)
                    res.csq[:, k] += p * np.bincount(g, ck * ck, minlength=G)
                    ic = np.floor(ck + 0.5).astype(np.int64)
                    keep = ic < H
                    np.add.at(res.hist[:, k, :], (g[keep], ic[keep]), depth)
                    for iw, w in enumerate(w_grid):
                        e = p * np.exp(w * ck)
                        res.mgf[:, k, iw] += np.bincount(g, e, minlength=G)
                        for js, s in enumerate(s_grid):
                            res.dirichlet[:, k, iw, js] += np.bincount(
                                g, e * np.exp(-s * le), minlength=G)
        if depth >= maxlen:
            break
        lo = words[np.arange(words.shape[0]), depth - lp]
        hi = np.minimum(cap, np.floor((bmax - P21) / P22).astype(np.int64))
        nchild = np.maximum(hi - lo + 1, 0)
        total = int(nchild.sum())
        if total == 0:
            break
        parent = np.repeat(np.arange(words.shape[0]), nchild)
        start = np.repeat(np.cumsum(nchild) - nchild, nchild)
        m = lo[parent] + (np.arange(total) - start)
        words = words[parent]
        words[:, depth] = m
        p11, p12, p21, p22 = P11[parent], P12[parent], P21[parent], P22[parent]
        P11, P12, P21, P22 = p12, p11 + m * p12, p22, p21 + m * p22
        lp = np.where(m == lo[parent], lp[parent], depth + 1)
        cs = cs[parent] + cost_tab[:, m].T
        md = np.maximum(md[parent], m)
        depth += 1


def scan_necklaces(bounds, cap, cost_tab, w_grid, s_grid, hist_size,
                   first_lo=1, first_hi=None, use_numba=None) -> ScanResult:
    """Accumulate every primitive necklace with ``eps + 1/eps <= bounds[-1]``.

    ``bounds`` holds ``N + 1/N`` for each population bound, ascending; the
    rqi lands in the first slot whose bound it meets.
    """
    bounds = np.ascontiguousarray(bounds, dtype=float)
    cost_tab = np.ascontiguousarray(cost_tab, dtype=float)
    w_grid = np.ascontiguousarray(w_grid, dtype=float)
    s_grid = np.ascontiguousarray(s_grid, dtype=float)
    if first_hi is None:
        first_hi = cap
    maxlen = max_period(bounds[-1])
    res = ScanResult(bounds.size, cost_tab.shape[0], w_grid.size, s_grid.size,
                     hist_size, cap)
    if use_numba is None:
        use_numba = USE_NUMBA
    if use_numba:
        _scan_nb(bounds, cap, first_lo, first_hi, cost_tab, w_grid, s_grid, maxlen,
                 res.counts, res.necklaces, res.csum, res.csq, res.mgf, res.dirichlet,
                 res.logeps, res.hist, res.maxdig)
    else:
        _scan_np(bounds, cap, first_lo, first_hi, cost_tab, w_grid, s_grid, maxlen, res)
    return res


@njit(cache=True, nogil=True)
def _records_nb(bmax, cap, cost_tab, maxlen, out_p, out_T, out_c, out_md):
    K = cost_tab.shape[0]
    n = maxlen + 2
    a = np.zeros(n, np.int64)
    m11 = np.zeros(n, np.int64)
    m12 = np.zeros(n, np.int64)
    m21 = np.zeros(n, np.int64)
    m22 = np.zeros(n, np.int64)
    m11[0] = 1
    m22[0] = 1
    lp = np.zeros(n, np.int64)
    cs = np.zeros((K, n))
    md = np.zeros(n, np.int64)
    cnt = 0
    depth = 1
    a[1] = 1
    while depth >= 1:
        m = a[depth]
        p21 = m21[depth - 1]
        p22 = m22[depth - 1]
        q = p21 + m * p22
        if m > cap or q > bmax:
            depth -= 1
            if depth >= 1:
                a[depth] += 1
            continue
        p11 = m11[depth - 1]
        p12 = m12[depth - 1]
        m11[depth] = p12
        m12[depth] = p11 + m * p12
        m21[depth] = p22
        m22[depth] = q
        if depth > 1 and m == a[depth - lp[depth - 1]]:
            lp[depth] = lp[depth - 1]
        else:
            lp[depth] = depth
        for k in range(K):
            cs[k, depth] = cs[k, depth - 1] + cost_tab[k, m]
        md[depth] = md[depth - 1] if md[depth - 1] > m else m
        if lp[depth] == depth:
            t = m11[depth] + m22[depth]
            T = t if depth % 2 == 0 else t * t + 2
            if T <= bmax:
                if cnt < out_p.shape[0]:
                    out_p[cnt] = depth
                    out_T[cnt] = T
                    out_md[cnt] = md[depth]
                    for k in range(K):
                        out_c[cnt, k] = cs[k, depth]
                cnt += 1
        if depth < maxlen:
            depth += 1
            a[depth] = a[depth - lp[depth - 1]]
        else:
            a[depth] += 1
    return cnt


def necklace_records(bound, cap, cost_tab, use_numba=None):
    """Per-necklace arrays ``(period, T, costs, maxdigit)`` with ``T <= bound``.

    ``T = eps + 1/eps`` is the exact integer trace invariant.
    """
    cost_tab = np.ascontiguousarray(np.atleast_2d(cost_tab), dtype=float)
    K = cost_tab.shape[0]
    maxlen = max_period(bound)
    if use_numba is None:
        use_numba = USE_NUMBA
    if use_numba:
        size = 1024
        while True:
            p = np.zeros(size, np.int64)
            T = np.zeros(size, np.int64)
            c = np.zeros((size, K))
            md = np.zeros(size, np.int64)
            n = _records_nb(float(bound), cap, cost_tab, maxlen, p, T, c, md)
            if n <= size:
                return p[:n], T[:n], c[:n], md[:n]
            size = n
    parts = []

    def emit(depth, T, cs, md):
        parts.append((np.full(T.size, depth, np.int64), T.astype(np.int64), cs, md))

    res = ScanResult(1, K, 0, 0, 1, cap)
    _scan_np(np.array([float(bound)]), cap, 1, cap, cost_tab, np.zeros(0), np.zeros(0),
             maxlen, res, emit=emit)
    if not parts:
        return (np.zeros(0, np.int64), np.zeros(0, np.int64), np.zeros((0, K)),
                np.zeros(0, np.int64))
    return tuple(np.concatenate([q[i] for q in parts]) for i in range(4))


# ---------------------------------------------------------------------------
# collocation assembly
# ---------------------------------------------------------------------------


@njit(cache=True, nogil=True)
def _assemble_nb(x, bw, s, w, cvals, m_lo, m_hi, out):
    D = x.shape[0]
    B = s.shape[0]
    tmp = np.empty(D)
    for i in range(D):
        xi = x[i]
        for m in range(m_lo, m_hi + 1):
            y = 1.0 / (m + xi)
            lmx = math.log(m + xi)
            hit = -1
            tot = 0.0
            for j in range(D):
                dif = y - x[j]
                if dif == 0.0:
                    hit = j
                    break
                tmp[j] = bw[j] / dif
                tot += tmp[j]
            cm = cvals[m]
            for b in range(B):
                wb = np.exp(w[b] * cm - 2.0 * s[b] * lmx)
                if hit >= 0:
                    out[b, i, hit] += wb
                else:
                    f = wb / tot
                    for j in range(D):
                        out[b, i, j] += f * tmp[j]


def _assemble_np(x, bw, s, w, cvals, m_lo, m_hi, out, chunk=20000):
    for lo in range(m_lo, m_hi + 1, chunk):
        hi = min(lo + chunk - 1, m_hi)
        m = np.arange(lo, hi + 1, dtype=float)
        cm = cvals[lo:hi + 1]
        for i, xi in enumerate(x):
            y = 1.0 / (m + xi)
            dif = y[:, None] - x[None, :]
            hit = dif == 0.0
            with np.errstate(divide="ignore", invalid="ignore"):
                tmp = bw[None, :] / dif
                L = tmp / tmp.sum(axis=1, keepdims=True)
            rows = hit.any(axis=1)
            if rows.any():
                L[rows] = hit[rows].astype(float)
            lmx = np.log(m + xi)
            W = np.exp(w[:, None] * cm[None, :] - 2.0 * s[:, None] * lmx[None, :])
            out[:, i, :] += W @ L


def assemble(x, bw, s, w, cvals, m_lo, m_hi, use_numba=None):
    """Sum ``e^{w c(m)} (m + x_i)^{-2s} L_j(1/(m + x_i))`` over ``m_lo..m_hi``.

    ``s`` and ``w`` are arrays of equal length (a batch of parameter pairs);
    returns an array of shape ``(batch, D, D)``.
    """
    s = np.atleast_1d(s)
    w = np.atleast_1d(w)
    dtype = complex if (np.iscomplexobj(s) or np.iscomplexobj(w)) else float
    s = s.astype(dtype)
    w = w.astype(dtype)
    out = np.zeros((s.size, x.size, x.size), dtype)
    if m_hi < m_lo:
        return out
    if use_numba is None:
        use_numba = USE_NUMBA
    if use_numba:
        _assemble_nb(x, bw, s, w, cvals, m_lo, m_hi, out)
    else:
        _assemble_np(x, bw, s, w, cvals, m_lo, m_hi, out)
    return out
