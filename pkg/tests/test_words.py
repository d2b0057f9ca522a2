import pytest
from hypothesis import given, settings, strategies as st

from bexp.errors import BumpOutOfRange, ParseError
from bexp.words import (Order, PeriodicStream, VClass, bump_last, c_block,
                        classify_V_admissible, is_alpha_admissible, is_beta_admissible,
                        is_matched, lex_compare, parse_stream, parse_word, reflect,
                        thue_morse, thue_morse_stream)


def w(text, m):
    return parse_word(text, m)


def s(text, m):
    return parse_stream(text, m)


@pytest.mark.parametrize("text,m,expected", [("1101", 1, "0010"), ("120", 3, "213")])
def test_reflect_examples(text, m, expected):
    assert str(reflect(w(text, m))) == expected


def test_bump_last():
    assert str(bump_last(w("221", 3), "+")) == "222"
    assert str(bump_last(w("222", 3), "-")) == "221"
    with pytest.raises(BumpOutOfRange):
        bump_last(w("223", 3), "+")


def test_lex_compare_examples():
    assert lex_compare(s("(10)^inf", 1), s("(110)^inf", 1), 3) is Order.LT
    assert lex_compare(s("0(110)^inf", 1), s("(001)^inf", 1), 3) is Order.GT
    x = s("01(0)^inf", 1)
    assert lex_compare(x, x, 5) in (Order.EQ, Order.EQ_TO_DEPTH)


def test_shift_examples():
    assert s("(110)^inf", 1).shift(1) == s("(101)^inf", 1)
    x = s("00(10)^inf", 1)
    assert x.shift(0) == x
    assert x.shift(3) == PeriodicStream((), (0, 1), 1)


def test_thue_morse_prefix():
    # oracle: parity of the binary digit count
    assert [thue_morse(i) for i in range(8)] == [0, 1, 1, 0, 1, 0, 0, 1]
    assert all(thue_morse(i) == bin(i).count("1") % 2 for i in range(300))


def test_c_block_hand_recursion():
    c0 = w("1", 3)
    assert str(c_block(c0, 0)) == "2"
    assert str(c_block(c0, 2)) == "2212"
    assert str(c_block(c0, 3)) == "22121122"
    assert len(c_block(c0, 5)) == 32


@pytest.mark.parametrize("text,expected", [("(10)^inf", True), ("(01)^inf", False), ("(110)^inf", True)])
def test_alpha_admissible(text, expected):
    assert is_alpha_admissible(s(text, 1)) is expected


def test_beta_admissible():
    assert is_beta_admissible(s("11(0)^inf", 1))
    assert not is_beta_admissible(s("(10)^inf", 1))
    for m in (1, 2, 5):
        assert not is_beta_admissible(PeriodicStream((), (m,), m))


def test_v_classes():
    assert classify_V_admissible(s("(110)^inf", 1)) is VClass.UBAR
    assert classify_V_admissible(s("(10)^inf", 1)) is VClass.V
    assert classify_V_admissible(thue_morse_stream(1), 48) is VClass.U


def test_is_matched_examples():
    a = w("21", 2)
    assert is_matched(w("1", 2), a)
    assert not is_matched(w("2", 2), a)
    assert is_matched(w("0", 2), a)


def test_parse_errors_carry_position():
    with pytest.raises(ParseError) as info:
        parse_stream("12x", 2)
    assert info.value.position is not None
    with pytest.raises(ParseError):
        parse_word("3", 2)


digits = st.integers(min_value=1, max_value=4).flatmap(
    lambda m: st.tuples(st.just(m), st.lists(st.integers(0, m), max_size=5),
                        st.lists(st.integers(0, m), min_size=1, max_size=5)))


@given(digits)
def test_reflect_is_involution(case):
    m, pre, per = case
    x = PeriodicStream(tuple(pre), tuple(per), m)
    assert reflect(reflect(x)) == x
    assert all(reflect(x).digit_at(i) == m - x.digit_at(i) for i in range(1, 20))


@given(digits, st.integers(0, 12))
def test_shift_matches_digit_index(case, n):
    m, pre, per = case
    x = PeriodicStream(tuple(pre), tuple(per), m)
    y = x.shift(n)
    assert all(y.digit_at(i) == x.digit_at(i + n) for i in range(1, 25))


@settings(max_examples=60)
@given(digits, digits)
def test_lex_compare_is_antisymmetric(a, b):
    m = a[0]
    x = PeriodicStream(tuple(a[1]), tuple(a[2]), m)
    per = tuple(min(d, m) for d in b[2])
    y = PeriodicStream(tuple(min(d, m) for d in b[1]), per, m)
    flip = {Order.LT: Order.GT, Order.GT: Order.LT, Order.EQ: Order.EQ,
            Order.EQ_TO_DEPTH: Order.EQ_TO_DEPTH}
    assert lex_compare(y, x, 30) is flip[lex_compare(x, y, 30)]
    # naive oracle over the first 30 digits plus the cycle bound
    n = 30 + len(x.preperiod) + len(y.preperiod) + len(x.period) * len(y.period)
    naive = [x.digit_at(i) for i in range(1, n + 1)], [y.digit_at(i) for i in range(1, n + 1)]
    expect = Order.LT if naive[0] < naive[1] else Order.GT if naive[0] > naive[1] else Order.EQ
    assert lex_compare(x, y, 30) is expect
