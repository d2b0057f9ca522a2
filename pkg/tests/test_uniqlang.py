import itertools

import pytest
from hypothesis import given, settings, strategies as st

from bexp.errors import ContractViolation
from bexp.numeric import rational
from bexp.uniqlang import (LanguageSpec, RightEndpoint, Slice, alpha_for, cross_validate,
                           enumerate_words, extendable, forbidden_block_scan, recognize)
from bexp.words import DigitWord, format_digits


def spec(m, g, sl=RightEndpoint()):
    return LanguageSpec(m, DigitWord((g,), m), sl)


def test_recognize_examples():
    assert recognize("11121", spec(3, 1))
    assert recognize("2111", spec(2, 1))


def test_31_is_accepted():
    # "31" reflects "02", a legal 0^N b start; the oracle agrees it extends
    s = spec(3, 1)
    assert recognize("31", s)
    _, alpha = alpha_for(s)
    assert extendable((3, 1), alpha, s)


def test_enumerate_small_lengths():
    s = spec(3, 1)
    assert [w.digits for w in enumerate_words(s, 0)] == [()]
    two = sorted(format_digits(w.digits, 3) for w in enumerate_words(s, 2))
    assert two == ["00", "01", "02", "11", "12", "21", "22", "31", "32", "33"]
    # reflection closed
    assert sorted("".join(str(3 - int(c)) for c in x) for x in two) == two


def test_enumerate_matches_recognize():
    s = spec(2, 1, Slice(2))
    words = {w.digits for w in enumerate_words(s, 5)}
    brute = {d for d in itertools.product(range(3), repeat=5) if recognize(DigitWord(d, 2), s)}
    assert words == brute


@pytest.mark.parametrize("m", [2, 3])
def test_cross_validation_slice1(m):
    report = cross_validate(spec(m, 1, Slice(1)), length=8)
    assert report.disagreements == [] and report.undecided == []
    assert report.accepted > 0


def test_cross_validation_negative_control():
    report = cross_validate(spec(3, 1, Slice(1)), q=rational(3.5), length=6)
    assert report.disagreements


def test_m1_first_component_is_rejected():
    with pytest.raises(ContractViolation):
        spec(1, 0)


@pytest.mark.parametrize("m,g,ell", [(2, 1, 1), (3, 1, 2), (4, 2, 1)])
def test_forbidden_blocks_absent(m, g, ell):
    assert forbidden_block_scan(spec(m, g, Slice(ell)), max_extra=3) == []


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([(2, 1, Slice(1)), (3, 1, RightEndpoint()), (4, 2, Slice(2))]),
       st.data())
def test_prefix_and_reflection_closure(case, data):
    m, g, sl = case
    s = spec(m, g, sl)
    digits = tuple(data.draw(st.lists(st.integers(0, m), min_size=1, max_size=9)))
    verdict = bool(recognize(DigitWord(digits, m), s))
    assert verdict == bool(recognize(DigitWord(tuple(m - d for d in digits), m), s))
    if verdict:
        assert all(recognize(DigitWord(digits[:i], m), s) for i in range(len(digits)))
