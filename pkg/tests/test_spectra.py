import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from bexp.numeric import rational
from bexp.spectra import (G, alpha_of, base_of_alpha, base_of_beta, beta_of, classify_base,
                          component_from_generator, golden, q_f, q_KL, q_s, tribonacci)
from bexp.words import VClass, parse_stream, parse_word


def approx(b):
    return float(b.interval(80).lo)


@pytest.mark.parametrize("m,value", [(1, (1 + math.sqrt(5)) / 2), (2, 2.0), (3, 1 + math.sqrt(3))])
def test_generalized_golden(m, value):
    assert approx(G(m)) == pytest.approx(value, abs=1e-14)


def test_reference_constants():
    # q_f ~ 1.75488, q_f(2) = 1+sqrt2, q_f(3) ~ 2.893, q_s ~ 1.71064
    assert round(approx(q_f(1)), 5) == 1.75488
    assert approx(q_f(2)) == pytest.approx(1 + math.sqrt(2), abs=1e-14)
    assert round(approx(q_f(3)), 3) == 2.893
    assert round(approx(q_s()), 5) == 1.71064
    assert round(approx(tribonacci()), 5) == 1.83929


def test_komornik_loreti():
    assert approx(q_KL(1)) == pytest.approx(1.787231650, abs=1e-8)
    assert str(alpha_of(q_KL(2), 2, 7)) == "2102012"


def test_alpha_beta_examples():
    assert str(alpha_of(golden(), 1, 6)) == "101010"
    assert str(alpha_of(rational(2), 2, 5)) == "11111"
    assert str(alpha_of(rational(3), 2, 5)) == "22222"
    assert str(beta_of(golden(), 1, 6)) == "110000"
    assert str(beta_of(rational(3), 2, 4)) == "2222"
    assert str(beta_of(rational(2), 1, 4)) == "1111"


def test_inverse_maps():
    assert approx(base_of_alpha(parse_stream("(10)^inf", 1), 1)) == pytest.approx(approx(golden()))
    assert approx(base_of_alpha(parse_stream("(110)^inf", 1), 1)) == pytest.approx(1.8392867552)
    assert approx(base_of_alpha(parse_stream("(21)^inf", 2), 2)) == pytest.approx(1 + math.sqrt(3))
    assert approx(base_of_beta(parse_word("11", 1), 1)) == pytest.approx(approx(golden()))


def test_classify_base():
    assert classify_base(tribonacci(), 1) is VClass.UBAR
    assert classify_base(golden(), 1) is VClass.V
    assert classify_base(rational(Fraction(17, 10)), 1) is VClass.NONE


def test_components():
    c = component_from_generator(parse_word("1", 3), 3, 1)
    assert approx(c.ladder[0]) == pytest.approx(1 + math.sqrt(3))
    assert component_from_generator(parse_word("1", 3), 3, 0).ladder == ()
    c = component_from_generator(parse_word("0", 1), 1, 2)
    # c1 = 11 gives the golden ratio, c2 = 1101 gives q_f(1)
    assert [round(approx(x), 6) for x in c.ladder] == [1.618034, 1.754878]


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3), st.fractions(min_value=Fraction(6, 5), max_value=4, max_denominator=40),
       st.fractions(min_value=Fraction(6, 5), max_value=4, max_denominator=40))
def test_alpha_is_monotone(m, p, q):
    p, q = min(p, Fraction(m + 1)), min(q, Fraction(m + 1))
    if p == q:
        return
    lo, hi = sorted((p, q))
    a = alpha_of(rational(lo), m, 40).digits
    b = alpha_of(rational(hi), m, 40).digits
    assert a <= b
