import itertools
import math

import pytest

from rqilab.costs import (GrowthCertificateError, audit_moderate_growth, binlen_cost, chi_cost,
                          cost_from_name, custom_cost, unit_cost)


def test_values_table():
    v = binlen_cost().values(9)
    assert list(v[1:]) == [1, 2, 2, 3, 3, 3, 3, 4, 4]
    assert list(chi_cost(2).values(4)[1:]) == [0, 1, 0, 0]


def test_growth_audit():
    audit_moderate_growth(unit_cost(), 1000)
    cert = audit_moderate_growth(binlen_cost(), 1 << 16)
    assert cert.A == pytest.approx(1 / math.log(2))
    with pytest.raises(GrowthCertificateError) as e:
        audit_moderate_growth(custom_cost(range(1, 101), A=1.0, B=1.0), 100)
    assert e.value.m <= 5


def test_tail_blocks_cover_binlen():
    blocks = list(itertools.islice(binlen_cost().tail_blocks(0), 3))
    assert blocks == [(1, 1, 1.0), (2, 3, 2.0), (4, 7, 3.0)]
    assert next(binlen_cost().tail_blocks(5)) == (6, 7, 3.0)


def test_names():
    assert cost_from_name("chi", 3) == chi_cost(3)
    assert cost_from_name("chi2").id == "chi2"
    assert cost_from_name("binlen") == binlen_cost()
    with pytest.raises(ValueError):
        cost_from_name("chi")
    with pytest.raises(ValueError):
        cost_from_name("nope")


def test_lattice_flags():
    assert unit_cost().is_lattice and unit_cost().integer_valued
    assert not custom_cost([0.5, 0.25], 0.0, 1.0).integer_valued
