import math

import numpy as np
import pytest

from rqilab.costs import chi_cost, unit_cost
from rqilab.spectral import DomainError, OperatorParams, SpectralConfig, build_operator
from rqilab.traces import (P_partial, Yk, Z_partial, pole_and_residue, quasi_inverses,
                           quasi_powers_prediction, trace_component, trace_Hk_direct,
                           trace_Hk_matrix, words_by_product, write_trace_audit)

# frozen from mpmath
TC_1 = 0.276393202250021030
TC_12 = 0.077350269189625765
Y1_AT_3 = 0.370834977630934020   # sum over m of rho_m^{-3}, rho_m = (m + sqrt(m^2 + 4)) / 2
INV_E = 0.421382956636097258
MU_UNIT = 0.842765913272194517


def test_trace_components():
    assert trace_component((1,), 1, 0, unit_cost()).real == pytest.approx(TC_1, rel=1e-14)
    assert trace_component((1, 2), 1, 0, unit_cost()).real == pytest.approx(TC_12, rel=1e-14)
    assert abs(trace_component((1, 2), 40, 0, unit_cost())) < 1e-40


def test_words_by_product():
    w = words_by_product(2, 10)
    assert w.shape == (sum(10 // m for m in range(1, 11)), 2)
    assert np.all(w.prod(axis=1) <= 10)
    assert len({tuple(r) for r in w}) == w.shape[0]


def test_direct_trace_cutoffs_agree():
    a = trace_Hk_direct(1, 1.2, 0.0, cutoff=10_000)
    b = trace_Hk_direct(1, 1.2, 0.0, cutoff=100_000)
    assert abs(a.value - b.value) <= a.tail + b.tail
    assert b.tail < a.tail


def test_pair_traces_are_cyclic():
    for a, b in [(1, 2), (3, 7), (2, 5)]:
        x = trace_component((a, b), 1.3, 0.1, chi_cost(2))
        y = trace_component((b, a), 1.3, 0.1, chi_cost(2))
        assert x == pytest.approx(y, rel=1e-14)


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_matrix_traces(k):
    m = trace_Hk_matrix(k, 1.2, 0.0, cfg=SpectralConfig(D=32))
    d = trace_Hk_direct(k, 1.2, 0.0)
    assert abs(m.value - d.value) <= max(d.tail, m.err)


def test_raw_matrix_trace_is_offered():
    m = trace_Hk_matrix(1, 1.2, 0.0, cfg=SpectralConfig(D=16, M_t=2000), method="raw")
    assert np.isnan(m.err)
    with pytest.raises(ValueError):
        trace_Hk_matrix(1, 1.2, 0.0, method="bogus")


def test_identity_gaps():
    r = Yk(1, 2.4, 0.0, cutoff=10_000)
    assert r.gap <= 1e-9
    r2 = Yk(2, 2.4, 0.0, cutoff=2000)
    assert r2.gap <= 1e-12
    r3 = Yk(1, 2.4, 0.1, unit_cost(), cutoff=5000)
    assert r3.gap <= 1e-12


def test_y1_against_closed_sum():
    r = Yk(1, 3.0, 0.0, cutoff=10_000)
    assert abs(r.direct.real - Y1_AT_3) <= r.tail
    assert r.tail < 1e-7


def test_y_matrix_route():
    r = Yk(2, 3.0, 0.05, cutoff=10_000, cfg=SpectralConfig(D=32))
    assert r.matrix_consistent


def test_series_tails_and_positivity():
    lo = P_partial(3.0, N_cut=1e3)
    hi = P_partial(3.0, N_cut=1e4)
    assert 0 < (hi.value - lo.value).real <= 2 * lo.tail_estimate
    assert abs((hi.value - lo.value).real - lo.tail_estimate) < 0.2 * lo.tail_estimate
    z = Z_partial(3.0, N_cut=1e3)
    assert z.value.real >= lo.value.real and z.terms > lo.terms
    with pytest.raises(DomainError):
        P_partial(2.0)


def test_pole_at_zero():
    p = pole_and_residue(0.0)
    assert p.s_w == pytest.approx(2.0, abs=1e-13)
    assert p.residue == pytest.approx(INV_E, abs=1e-8)


def test_pole_moves_with_mu():
    a, b = pole_and_residue(0.01), pole_and_residue(-0.01)
    assert (a.s_w - b.s_w) / 0.02 == pytest.approx(MU_UNIT, abs=1e-4)
    assert abs(a.residue - INV_E) < 5e-3


def test_quasi_powers_is_log_linear():
    assert quasi_powers_prediction(0.0, 1e3) == 1.0
    Ns = np.array([1e2, 1e3, 1e4])
    v = [math.log(quasi_powers_prediction(0.05, N)) for N in Ns]
    slope = np.polyfit(np.log(Ns), v, 1)[0]
    sig = pole_and_residue(0.05).sigma
    assert slope == pytest.approx(2 * (sig - 1), abs=1e-3)


def test_quasi_inverses():
    A = build_operator(OperatorParams(1.5, 0.0, unit_cost(), order=16, digit_truncation=2000)).matrix
    E, O = quasi_inverses(A)
    assert np.allclose(O @ A, E, atol=1e-13)
    assert np.allclose(E - A @ A @ E, A @ A, atol=1e-13)


def test_trace_audit(tmp_path):
    rs = [Yk(k, 2.4, 0.0, cutoff=500) for k in (1, 2)]
    write_trace_audit(tmp_path / "t.csv", rs)
    assert len((tmp_path / "t.csv").read_text().splitlines()) == 3
