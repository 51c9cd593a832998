import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from rqilab.costs import chi_cost, custom_cost, unit_cost
from rqilab.orbits import population
from rqilab.stats import (UnsupportedCostError, empirical_mgf, empirical_moments, ks_normal,
                          lattice_ks, local_limit_window, log_epsilon_study,
                          moments_from_histogram, run_study, slope_fit, standardized_ks)
from rqilab.traces import quasi_powers_prediction

MU_UNIT = 0.842765913272194517


@pytest.fixture(scope="module")
def pop4():
    return population(4, [unit_cost(), chi_cost(3)], (0.1,))


def test_moments_n4(pop4):
    m, v = empirical_moments(pop4)
    assert m == pytest.approx(5 / 3, rel=1e-15) and v == pytest.approx(2 / 9, rel=1e-12)
    assert empirical_moments(pop4, "chi3") == (0.0, 0.0)


def test_moment_paths_agree(grid_populations):
    for sm in grid_populations:
        for cid in sm.cost_ids:
            a, b = empirical_moments(sm, cid), moments_from_histogram(sm, cid)
            assert a == pytest.approx(b, rel=1e-12)
        assert empirical_moments(sm)[0] >= 1


def test_mgf_n4(pop4):
    assert empirical_mgf(pop4, 0.0) == 1.0
    assert empirical_mgf(pop4, 0.1) == pytest.approx((math.exp(0.1) + 2 * math.exp(0.2)) / 3,
                                                     rel=1e-15)
    with pytest.raises(KeyError):
        empirical_mgf(pop4, 0.3)


def test_slope_fit_exact():
    f = slope_fit([(x, 2.5 * x - 1) for x in (1.0, 2.0, 4.0)])
    assert (f.slope, f.intercept) == pytest.approx((2.5, -1.0), abs=1e-14)
    assert f.max_residual < 1e-14
    with pytest.raises(ValueError):
        slope_fit([(1.0, 1.0), (2.0, 2.0)])
    with pytest.raises(ValueError):
        slope_fit([(1.0, 1.0), (1.0, 2.0), (1.0, 3.0)])


@given(st.floats(0.1, 3.0), st.floats(-2.0, 2.0))
def test_slope_fit_recovers_constants(mu, mu1):
    pts = [(math.log(N), mu * math.log(N) + mu1) for N in (1e2, 1e3, 1e4)]
    f = slope_fit(pts)
    assert f.slope == pytest.approx(mu, abs=1e-12) and f.intercept == pytest.approx(mu1, abs=1e-11)


def test_ks_harness_on_normal_sample():
    x = np.random.default_rng(7).standard_normal(5000)
    assert ks_normal(x) < 1.63 / math.sqrt(x.size)


def test_lattice_ks_matches_sample_ks():
    # integer data read through the histogram path equals the sample statistic
    x = np.random.default_rng(3).poisson(30, 4000)
    h = np.bincount(x)
    assert lattice_ks(h, 30.0, math.sqrt(30.0)) == pytest.approx(
        ks_normal((x - 30.0) / math.sqrt(30.0)), abs=1e-12)


def test_ks_decreases(grid_populations, unit_constants):
    ks = [standardized_ks(sm, unit_constants.mu, unit_constants.nu) for sm in grid_populations]
    assert all(0 <= k <= 1 for k in ks)
    assert ks[0] > ks[1] > ks[2]


@pytest.mark.xfail(strict=True, reason="KS is still about 0.12 at N=1e4")
def test_ks_chi1_small(grid_populations):
    from rqilab.spectral import gaussian_constants, SpectralConfig
    gc = gaussian_constants(chi_cost(1), SpectralConfig(D=40))
    assert standardized_ks(grid_populations[-1], gc.mu, gc.nu, cost_id="chi1") <= 0.1


def test_ks_needs_enough_mass(pop4):
    with pytest.raises(ValueError):
        standardized_ks(pop4, MU_UNIT, 0.5)


@pytest.mark.parametrize("w", [0.05, -0.05])
def test_mgf_against_quasi_powers(grid_populations, w):
    sm = grid_populations[1]
    pred = quasi_powers_prediction(w, sm.N)
    assert empirical_mgf(sm, w) == pytest.approx(pred, rel=0.10)


def test_local_limit_windows(grid_populations, unit_constants):
    sm = grid_populations[-1]
    gc = unit_constants
    h = sm.histogram("unit")
    assert h.sum() == sm.count
    up, pu = local_limit_window(sm, 1.0, gc.mu, gc.nu)
    dn, pd = local_limit_window(sm, -1.0, gc.mu, gc.nu)
    assert pu == pd
    assert up == pytest.approx(dn, rel=0.15)


def test_local_limit_rejects_non_lattice():
    c = custom_cost([0.5, math.sqrt(2)], 0.0, 2.0)
    sm = population(200, [unit_cost()], ())
    with pytest.raises(UnsupportedCostError):
        local_limit_window(sm, 0.0, 1.0, 0.5, cost=c)


def test_log_epsilon(grid_populations):
    st_ = log_epsilon_study(grid_populations)
    for r in st_.rows:
        assert r.mean <= math.log(r.N)
        # log N - log eps is asymptotically exponential with rate 2
        assert r.mean == pytest.approx(r.exact_mean, abs=0.02)
    assert st_.var_ratio <= 1.2
    assert st_.slope.slope == pytest.approx(1.0, abs=0.01)


@pytest.mark.xfail(strict=True, reason="log eps <= log N forces slope 1, not 2")
def test_log_epsilon_slope_two(grid_populations):
    assert log_epsilon_study(grid_populations).slope.slope == pytest.approx(2.0, rel=0.05)


def test_run_study_outputs(tmp_path, grid_populations, unit_constants):
    st_ = run_study([1e2, 1e3, 1e4], unit_cost(), unit_constants.mu, unit_constants.nu,
                    summaries=grid_populations)
    assert st_.mean_fit.slope == pytest.approx(MU_UNIT, rel=0.05)
    assert st_.var_fit.slope == pytest.approx(unit_constants.nu, rel=0.10)
    st_.write_csv(tmp_path / "s.csv")
    st_.write_histogram_csv(tmp_path / "h.csv")
    rows = (tmp_path / "s.csv").read_text().splitlines()
    assert rows[0].startswith("N,count,mean,var,ks,mgf@")
    assert len(rows) == 4
    total = sum(int(l.split(",")[1]) for l in (tmp_path / "h.csv").read_text().splitlines()[1:])
    assert total == grid_populations[-1].count
    assert st_.to_json()["rows"][2]["count"] == grid_populations[-1].count
