"""Numba against the pure-numpy fallback for the two hot kernels.

    python3 benchmarks/bench_kernels.py [--n 3000] [--D 48] [--repeat 3]

The first numba call compiles (cached on disk afterwards), so it is timed
separately.  Both paths must agree; the script checks that too.
"""
import argparse
import time

import numpy as np

from rqilab.costs import chi_cost, unit_cost
from rqilab.kernels import assemble, max_period, scan_necklaces
from rqilab.orbits import DEFAULT_W_GRID, epsilon_bound
from rqilab.spectral import chebyshev_nodes


def best_of(fn, repeat):
    ts = []
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        ts.append(time.perf_counter() - t)
    return min(ts), out


def bench_scan(N, repeat):
    bound = epsilon_bound(N)
    cap = int(bound)
    costs = [unit_cost(), chi_cost(1)]
    tab = np.array([c.values(cap) for c in costs])
    hist = max_period(bound) + 2

    def run(nb):
        return scan_necklaces(np.array([bound]), cap, tab, DEFAULT_W_GRID, (), hist, use_numba=nb)

    t0 = time.perf_counter()
    run(True)
    first = time.perf_counter() - t0
    t_nb, a = best_of(lambda: run(True), repeat)
    t_np, b = best_of(lambda: run(False), repeat)
    assert a.counts[0] == b.counts[0] and np.allclose(a.csum, b.csum)
    return first, t_nb, t_np, int(a.counts[0])


def bench_assemble(D, m_hi, repeat):
    x, bw = chebyshev_nodes(D)
    s = np.array([1.0, 1.0005, 0.9995])
    w = np.zeros(3)
    cvals = np.ones(m_hi + 1)

    def run(nb):
        return assemble(x, bw, s, w, cvals, 1, m_hi, use_numba=nb)

    t0 = time.perf_counter()
    run(True)
    first = time.perf_counter() - t0
    t_nb, a = best_of(lambda: run(True), repeat)
    t_np, b = best_of(lambda: run(False), repeat)
    assert np.allclose(a, b, rtol=1e-12, atol=1e-15)
    return first, t_nb, t_np


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=float, default=3000.0, help="population bound for the scan")
    ap.add_argument("--D", type=int, default=48)
    ap.add_argument("--m-hi", type=int, default=20000, dest="m_hi")
    ap.add_argument("--repeat", type=int, default=3)
    a = ap.parse_args()

    first, t_nb, t_np, n = bench_scan(a.n, a.repeat)
    print(f"scan      N={a.n:g} ({n} rqis): numba {t_nb:.3f}s (first call {first:.2f}s), "
          f"numpy {t_np:.3f}s, speedup {t_np / t_nb:.1f}x")
    first, t_nb, t_np = bench_assemble(a.D, a.m_hi, a.repeat)
    print(f"assemble  D={a.D} m<={a.m_hi} x3: numba {t_nb:.3f}s (first call {first:.2f}s), "
          f"numpy {t_np:.3f}s, speedup {t_np / t_nb:.1f}x")


if __name__ == "__main__":
    main()
