import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from bexp.errors import SignContractViolated
from bexp.numeric import (CertifiedValue, Sign, eval_series, exact_sign, largest_real_root, monotone_bisect,
                          rational)
from bexp.spectra import golden
from bexp.words import PeriodicStream, parse_stream

TOL = Fraction(1, 2 ** 64)


def test_eval_single_term():
    v = eval_series(parse_stream("1(0)^inf", 1), rational(2))
    assert v.lower == v.upper == Fraction(1, 2)


def test_eval_golden_identity():
    v = eval_series(parse_stream("(10)^inf", 1), golden())
    assert v.lower <= 1 <= v.upper and v.upper - v.lower <= TOL


@pytest.mark.parametrize("m,q", [(1, Fraction(3, 2)), (2, Fraction(5, 2)), (4, Fraction(7, 3))])
def test_eval_geometric(m, q):
    v = eval_series(PeriodicStream((), (m,), m), rational(q))
    assert v.lower == v.upper == m / (q - 1)


def test_exact_sign_examples():
    phi = golden()
    assert exact_sign((-1, -1, 1), phi) is Sign.ZERO
    assert exact_sign((-2, 1), phi) is Sign.NEG
    assert exact_sign((0,), phi) is Sign.ZERO


@pytest.mark.parametrize("poly,box,value", [
    ((-1, 1, -2, 1), (1, 2), 1.754877666246693),       # q_f(1)
    ((-1, -1, -2, 0, 1), (1, 2), 1.710644095045033),    # q_s
    ((-2, -2, 1), (1, 3), 1 + math.sqrt(3)),
])
def test_largest_real_root(poly, box, value):
    root = largest_real_root(poly, box)
    iv = root.interval(80)
    assert abs(float(iv.lo) - value) < 1e-12
    assert iv.hi - iv.lo <= TOL


def _certified(g):
    """Lift an exact rational function of t to the Base -> CertifiedValue shape."""
    def f(t):
        v = g(t.interval(80).lo) if not hasattr(t, "value") else g(t.value)
        return CertifiedValue(v, v, 0)
    return f


def test_monotone_bisect():
    r = monotone_bisect(_certified(lambda t: t - Fraction(3, 2)), 1, 2, Fraction(1, 2 ** 20))
    assert abs(r.interval(40).lo - Fraction(3, 2)) <= Fraction(1, 2 ** 20)
    r = monotone_bisect(_certified(lambda t: 2 / t - 1 / (t - 1)), Fraction(19, 10), Fraction(21, 10))
    assert abs(r.interval(80).lo - 2) <= TOL
    with pytest.raises(SignContractViolated):
        monotone_bisect(_certified(lambda t: t), 1, 2)


@given(st.integers(1, 3), st.lists(st.integers(0, 3), max_size=4),
       st.lists(st.integers(0, 3), min_size=1, max_size=4),
       st.fractions(min_value=Fraction(6, 5), max_value=4, max_denominator=50))
def test_eval_matches_rational_closed_form(m, pre, per, q):
    pre = tuple(min(d, m) for d in pre)
    per = tuple(min(d, m) for d in per)
    if q > m + 1:
        q = Fraction(m + 1)
    v = eval_series(PeriodicStream(pre, per, m), rational(q))
    # independent oracle: closed form of an eventually periodic series
    head = sum(Fraction(d) / q ** (i + 1) for i, d in enumerate(pre))
    cyc = sum(Fraction(d) / q ** (i + 1) for i, d in enumerate(per))
    exact = head + cyc / q ** len(pre) / (1 - Fraction(1) / q ** len(per))
    assert v.lower <= exact <= v.upper
