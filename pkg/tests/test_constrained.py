import pytest

from rqilab.constrained import (constrained_constants, cycle_expansion_dimension,
                                hausdorff_dim, two_term_expansion, lambda_M, sigma_for_cap,
                                threshold_probe, write_dimension_csv, write_threshold_csv)
from rqilab.spectral import SpectralConfig, gaussian_constants
from rqilab.costs import unit_cost

# dimension of the digits-{1,2} Cantor set, published to many digits
SIGMA_2 = 0.531280506277205141624
# frozen from mpmath
TWO_TERM_10 = -0.155624569065397002
MU_UNIT = 0.842765913272194517


def test_lambda_M_basics():
    assert lambda_M(1.0, None) == pytest.approx(1.0, abs=1e-12)
    assert lambda_M(1.0, 2) < 1
    assert lambda_M(0.8, 2) < lambda_M(0.8, 3) < lambda_M(0.8, 10)
    assert lambda_M(0.7, 5) > lambda_M(0.8, 5)
    with pytest.raises(ValueError):
        lambda_M(0.4, 2)


def test_sigma_2():
    r = hausdorff_dim(2)
    assert abs(r.sigma_M - SIGMA_2) <= 1e-10
    assert r.drift <= 1e-10 and r.residual <= 1e-12


def test_cycle_expansion_oracle():
    assert abs(cycle_expansion_dimension(2) - SIGMA_2) <= 1e-9


def test_dimensions_monotone_and_two_term():
    Ms = (2, 5, 10, 20, 50, 100)
    sig = [hausdorff_dim(M, check_doubling=False).sigma_M for M in Ms]
    assert all(b > a for a, b in zip(sig, sig[1:])) and sig[-1] < 1
    s = dict(zip(Ms, sig))
    assert 2 * (s[20] - 1) == pytest.approx(two_term_expansion(20), rel=0.15)
    rel = {M: abs((2 * (s[M] - 1) - two_term_expansion(M)) / two_term_expansion(M)) for M in (10, 100)}
    assert rel[100] < rel[10]


def test_two_term_values():
    assert two_term_expansion(10) == pytest.approx(TWO_TERM_10, rel=1e-14)
    assert abs(two_term_expansion(1e9)) < 1e-8
    with pytest.raises(ValueError):
        two_term_expansion(1)


def test_uncapped_constants_reduce():
    cfg = SpectralConfig(D=24, M_t=2000)
    a = constrained_constants(None, cfg=cfg)
    b = gaussian_constants(unit_cost(), cfg)
    assert a.mu == b.mu and a.nu == b.nu


def test_capped_mean_two_ways():
    gc = constrained_constants(2)
    assert gc.mu == pytest.approx(gc.diagnostics["mu_formula"], rel=1e-7)
    assert gc.diagnostics["sigma_M"] == pytest.approx(SIGMA_2, abs=1e-10)


def test_capped_mean_tends_to_mu():
    gaps = [constrained_constants(M).mu - MU_UNIT for M in (5, 10, 20, 50)]
    assert all(g > 0 for g in gaps)
    assert all(b < a for a, b in zip(gaps, gaps[1:]))


@pytest.fixture(scope="module")
def threshold_rows():
    return threshold_probe([1e2, 1e3, 1e4], [1, 2, 3, 5])


def test_threshold_single_digit(threshold_rows):
    assert sigma_for_cap(1) == 0.0
    for r in threshold_rows:
        if r.M == 1:
            assert r.capped_count == 1 and r.pi == 1 / r.count


def test_threshold_monotone(threshold_rows):
    t = {(r.N, r.M): r.pi for r in threshold_rows}
    for N in (1e2, 1e3, 1e4):
        assert t[N, 1] < t[N, 2] < t[N, 3] < t[N, 5]
    for M in (1, 2, 3, 5):
        assert t[1e2, M] > t[1e3, M] > t[1e4, M]


def test_threshold_power_law(threshold_rows):
    # the exponent is right: the ratio to N^{2(sigma_2 - 1)} settles to a constant
    r = {r.N: r.pi / r.prediction for r in threshold_rows if r.M == 2}
    assert abs(r[1e4] / r[1e3] - 1) < 0.02


@pytest.mark.xfail(strict=True, reason="the constant prefactor is about 3.56, beyond the factor 3 allowance")
def test_threshold_factor_three(threshold_rows):
    r = next(r for r in threshold_rows if r.N == 1e3 and r.M == 2)
    assert 1 / 3 <= r.pi / r.prediction <= 3


def test_csv_writers(tmp_path, threshold_rows):
    write_dimension_csv(tmp_path / "d.csv", [hausdorff_dim(3, check_doubling=False)])
    write_threshold_csv(tmp_path / "t.csv", threshold_rows)
    assert len((tmp_path / "d.csv").read_text().splitlines()) == 2
    assert len((tmp_path / "t.csv").read_text().splitlines()) == 1 + len(threshold_rows)
