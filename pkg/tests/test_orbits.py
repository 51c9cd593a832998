import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rqilab.acceptance import brute_force_population
from rqilab.costs import binlen_cost, chi_cost, unit_cost
from rqilab.kernels import necklace_records
from rqilab.orbits import (canonical_rotation, count_PN, enumerate_necklaces, epsilon_bound,
                           is_primitive, population, population_grid, write_audit_csv)

# frozen from the plain depth-first oracle and a full scan
FROZEN_COUNTS = {50: 547, 100: 2138, 1000: 210909}


@pytest.mark.parametrize("word,canon", [((2, 1), (1, 2)), ((1, 2, 1), (1, 1, 2)), ((3,), (3,))])
def test_canonical_rotation(word, canon):
    assert canonical_rotation(word) == canon


@given(st.lists(st.integers(1, 4), min_size=1, max_size=10))
def test_canonical_is_min_rotation(word):
    w = tuple(word)
    assert canonical_rotation(w) == min(w[i:] + w[:i] for i in range(len(w)))


@pytest.mark.parametrize("word,prim", [((1, 2), True), ((1, 2, 1, 2), False), ((1, 1, 2), True)])
def test_is_primitive(word, prim):
    assert is_primitive(word) is prim


def test_tiny_populations():
    assert [o.word for o in enumerate_necklaces(3)] == [(1,)]
    assert sorted(o.word for o in enumerate_necklaces(4)) == [(1,), (1, 2)]
    assert [o.word for o in enumerate_necklaces(6, digit_cap=1)] == [(1,)]
    assert count_PN(3) == 1 and count_PN(4) == 3


def test_population_n4():
    sm = population(4, [unit_cost()], (0.1,))
    assert sm.count == 3 and sm.necklaces == 2
    assert sm.csum[0] == 5


@pytest.mark.parametrize("N", [20, 50])
def test_against_brute_force(N):
    brute = brute_force_population(N)
    fast = {o.word: o.period for o in enumerate_necklaces(N)}
    assert set(brute) == set(fast)
    assert sum(brute.values()) == count_PN(N) == sum(fast.values())


def test_frozen_counts():
    pops = population_grid(sorted(FROZEN_COUNTS), [unit_cost()], ())
    assert {int(p.N): p.count for p in pops} == FROZEN_COUNTS


def test_cardinality_ratio(grid_populations):
    sm = grid_populations[1]
    assert 0.17 <= sm.count / sm.N ** 2 <= 0.23


def test_ties_are_included():
    # eps((1,2)) = 2 + sqrt(3) exactly; (1) has eps = phi^2
    assert count_PN(2 + math.sqrt(3)) == 3
    assert count_PN(2 + math.sqrt(3) - 1e-9) == 1


def test_epsilon_bound_rejects_small():
    with pytest.raises(ValueError):
        epsilon_bound(1.0)


def test_grid_matches_single_scans():
    costs = [unit_cost(), chi_cost(1), binlen_cost()]
    grid = population_grid([30, 200, 700], costs)
    for sm in grid:
        one = population(sm.N, costs)
        assert one.count == sm.count
        n = min(one.hist.shape[1], sm.hist.shape[1])
        assert np.array_equal(one.hist[:, :n], sm.hist[:, :n])
        assert one.hist[:, n:].sum() == sm.hist[:, n:].sum() == 0
        assert np.allclose(one.mgf, sm.mgf, rtol=1e-13)


def test_partitions_and_threads_agree():
    a = population(2000, [unit_cost()], partitions=1)
    b = population(2000, [unit_cost()], partitions=4, threads=2)
    assert a.count == b.count and np.array_equal(a.hist, b.hist)
    assert np.allclose(a.csq, b.csq, rtol=1e-14)


def test_numba_and_numpy_agree():
    costs = [unit_cost(), chi_cost(2), binlen_cost()]
    a = population(800, costs, s_grid=(2.5,), use_numba=True)
    b = population(800, costs, s_grid=(2.5,), use_numba=False)
    assert a.count == b.count and np.array_equal(a.hist, b.hist)
    assert np.array_equal(a.maxdig, b.maxdig)
    for f in ("csum", "csq", "mgf", "dirichlet"):
        assert np.allclose(getattr(a, f), getattr(b, f), rtol=1e-12)


def test_records_match_between_engines():
    tab = unit_cost().values(300)[None, :]
    ra = necklace_records(epsilon_bound(300), 300, tab, use_numba=True)
    rb = necklace_records(epsilon_bound(300), 300, tab, use_numba=False)
    key = lambda r: sorted(zip(r[0].tolist(), r[1].tolist()))
    assert key(ra) == key(rb)


def test_digit_cap_population():
    sm = population(1000, [unit_cost()], digit_cap=2)
    full = population(1000, [unit_cost()])
    assert sm.count == full.count_with_digits_at_most(2)


def test_summary_addition():
    a = population(300, [unit_cost()])
    s = a + a
    assert s.count == 2 * a.count
    with pytest.raises(ValueError):
        a + population(301, [unit_cost()])


@settings(max_examples=25, deadline=None)
@given(st.integers(3, 120))
def test_count_monotone(N):
    assert count_PN(N) <= count_PN(N + 1)


def test_audit_csv(tmp_path):
    n = write_audit_csv(tmp_path / "a.csv", 4)
    lines = (tmp_path / "a.csv").read_text().splitlines()
    assert n == 3 and len(lines) == 4
    assert lines[1].startswith("1,1,")


def test_env_switch_selects_numpy():
    import os
    import subprocess
    import sys
    code = ("from rqilab import _accel; from rqilab.orbits import count_PN; "
            "print(_accel.USE_NUMBA, count_PN(100))")
    env = dict(os.environ, RQILAB_NO_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True,
                         check=True).stdout.split()
    assert out == ["False", str(FROZEN_COUNTS[100])]
