import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from rqilab.cfcore import (ArithmeticOverflowError, IDENTITY, cost_eval, epsilon_trace,
                           fixed_point, gauss_map, golden_alpha, lft_compose, lft_of_digit,
                           lft_of_word, size_triple, spectral_radius)
from rqilab.costs import binlen_cost, chi_cost, unit_cost

PHI = (1 + math.sqrt(5)) / 2
words = st.lists(st.integers(1, 40), min_size=1, max_size=8).map(tuple)


def as_rows(h):
    return [[h.a, h.b], [h.c, h.d]]


@pytest.mark.parametrize("m", [1, 2, 7])
def test_digit_matrix(m):
    h = lft_of_digit(m)
    assert as_rows(h) == [[0, 1], [1, m]]
    assert h.det == -1


def test_digit_must_be_positive():
    with pytest.raises(ValueError):
        lft_of_digit(0)


def test_compose_by_hand():
    assert as_rows(lft_compose(lft_of_digit(1), lft_of_digit(2))) == [[1, 2], [1, 3]]
    h = lft_of_digit(5)
    assert lft_compose(IDENTITY, h) == h
    assert lft_compose(lft_of_digit(1), lft_of_digit(1)).det == 1


@pytest.mark.parametrize("word,rows", [
    ((1,), [[0, 1], [1, 1]]),
    ((1, 2), [[1, 2], [1, 3]]),
    ((1, 1, 2), [[1, 3], [2, 5]]),
])
def test_word_matrix(word, rows):
    assert as_rows(lft_of_word(word)) == rows


@pytest.mark.parametrize("word,rho", [
    ((1,), PHI), ((2,), 1 + math.sqrt(2)), ((1, 2), 2 + math.sqrt(3)),
])
def test_spectral_radius(word, rho):
    assert spectral_radius(lft_of_word(word)) == pytest.approx(rho, rel=1e-15)


def test_fixed_points():
    assert fixed_point(lft_of_word((1,))) == pytest.approx((math.sqrt(5) - 1) / 2, abs=1e-15)
    assert fixed_point(lft_of_word((2,))) == pytest.approx(math.sqrt(2) - 1, abs=1e-15)


@given(words)
def test_fixed_point_is_fixed(word):
    h = lft_of_word(word)
    x = fixed_point(h)
    assert abs((h.a * x + h.b) / (h.c * x + h.d) - x) <= 1e-14


def test_size_triples():
    t = size_triple((1,))
    assert (t.alpha, t.epsilon, t.q, t.r) == pytest.approx((1 / PHI, PHI ** 2, 1, 2))
    assert size_triple((2,)).epsilon == pytest.approx((1 + math.sqrt(2)) ** 2)
    t = size_triple((1, 2))
    assert (t.epsilon, t.q, t.r) == pytest.approx((2 + math.sqrt(3), 3, 1))


@given(words)
def test_size_bracket_and_trace(word):
    t = size_triple(word)
    assert 0.5 < t.alpha * t.q <= 1 + 1e-15
    T = epsilon_trace(word)
    assert T == pytest.approx(t.epsilon + 1 / t.epsilon, rel=1e-12)


@given(words, st.integers(0, 7))
def test_rotation_invariants(word, k):
    k %= len(word)
    rot = word[k:] + word[:k]
    assert epsilon_trace(rot) == epsilon_trace(word)
    assert lft_of_word(rot).det == lft_of_word(word).det


def test_costs_on_words():
    assert cost_eval(unit_cost(), (1, 2, 1)) == 3
    assert cost_eval(chi_cost(2), (1, 2, 1)) == 1
    assert cost_eval(binlen_cost(), (1, 2, 5)) == 6


def test_gauss_map():
    assert gauss_map(0.5) == (2, 0.0)
    m, y = gauss_map((math.sqrt(5) - 1) / 2)
    assert m == 1 and y == pytest.approx((math.sqrt(5) - 1) / 2, abs=1e-15)
    assert gauss_map(Fraction(2, 7)) == (3, Fraction(1, 2))
    assert gauss_map(0) is None
    with pytest.raises(ValueError):
        gauss_map(1.5)


def test_golden_alpha():
    assert golden_alpha(3) == pytest.approx(size_triple((1, 1, 1)).alpha, rel=1e-14)
    assert golden_alpha(2) == pytest.approx(PHI ** -2)


def test_overflow_is_reported():
    with pytest.raises(ArithmeticOverflowError):
        lft_of_word((10 ** 6,) * 12)
