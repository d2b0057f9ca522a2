"""The dictionary between bases and sequences.

alpha(q) / beta(q) and their inverses, the named constants (generalized
golden ratio, q_f, Komornik-Loreti), the U / Ubar / V classification of a
base and the components of the complement of the closure of U.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction

from bexp.errors import LadderNotMonotone, NotAdmissible, UndecidedAtDepth
from bexp.expansions import alpha_stream, greedy_expand, quasi_greedy_expand
from bexp.numeric import (DEFAULT_TOL, IntervalBase, Sign, exact_sign, largest_real_root,
                          monomial, poly_add, poly_sub, rational, root_in,
                          series_rational_function)
from bexp.words import (DigitWord, KnownPrefix, Order, PeriodicStream, VClass, bump_last,
                        c_block, c_limit_stream, classify_V_admissible, is_alpha_admissible,
                        is_beta_admissible, lex_compare, thue_morse_stream)


def alpha_of(q, m, depth=64):
    """First ``depth`` digits of the quasi-greedy expansion of 1."""
    q.check_range(m)
    return quasi_greedy_expand(1, q, m, depth)


def beta_of(q, m, depth=64):
    """First ``depth`` digits of the greedy expansion of 1."""
    q.check_range(m)
    return greedy_expand(1, q, m, depth)


def _prefix_poly(digits):
    """t^n * (sum d_i t^-i) as an ascending integer polynomial."""
    n = len(digits)
    return tuple(digits[n - 1 - i] for i in range(n))


def _int_sign(poly, x):
    """Sign of poly(x) for rational x, in integer arithmetic."""
    x = Fraction(x)
    p, q = x.numerator, x.denominator
    v, qp = 0, 1
    for c in reversed(poly):
        v = v * p + c * qp
        qp *= q
    # v = poly(x) * q^deg, same sign
    return (v > 0) - (v < 0)


def _bisect_poly(poly, lo, hi, tol):
    """Bracket of the unique sign change of ``poly`` in [lo, hi]."""
    s_lo = _int_sign(poly, lo)
    if _int_sign(poly, hi) == s_lo:
        raise UndecidedAtDepth("no sign change while bracketing a root")
    while hi - lo > tol:
        mid = (lo + hi) / 2
        s = _int_sign(poly, mid)
        if s == 0:
            return mid, mid
        if s == s_lo:
            lo = mid
        else:
            hi = mid
    return lo, hi


def _value_one_bracket(digits, m, tol):
    """Bases q whose alpha starts with ``digits``.

    With g(t) = (digits)_t decreasing, such q satisfy g(q) <= 1 and, because
    the admissible tail is worth at most 1, g(q) + q^-n >= 1.
    """
    if not digits or digits[0] == 0:
        raise NotAdmissible("an expansion of 1 cannot start with 0")
    n = len(digits)
    p = _prefix_poly(digits)
    top = Fraction(m + 1)
    high = poly_sub(p, monomial(n))  # root: lower end
    low = poly_add(high, (1,))       # root: upper end
    if _int_sign(high, Fraction(1)) > 0:
        lo, _ = _bisect_poly(high, Fraction(1), top, tol / 4)
    else:
        lo = Fraction(1)
    if _int_sign(low, top) < 0:
        _, hi = _bisect_poly(low, Fraction(1), top, tol / 4)
    else:
        hi = top
    return lo, hi


def base_of_alpha(s, m, tol=DEFAULT_TOL, depth=64):
    """The base q with alpha(q) = s.

    Periodic streams give an exact base; generator streams an ``IntervalBase``
    of width <= tol; a ``KnownPrefix`` gives the bracket of all bases whose
    alpha starts with the known digits.
    """
    if s.alphabet_max != m:
        raise ValueError("stream alphabet differs from m")
    if isinstance(s, PeriodicStream):
        if not is_alpha_admissible(s):
            raise NotAdmissible(f"{s} is not alpha-admissible")
        num, den = series_rational_function(s)
        return root_in(poly_sub(num, den), 1, m + 1, tol)
    if isinstance(s, KnownPrefix):
        if not is_alpha_admissible(s, len(s.known)):
            raise NotAdmissible(f"{s} is not alpha-admissible")
        lo, hi = _value_one_bracket(s.known, m, tol)
        return IntervalBase(lo, hi)
    if not is_alpha_admissible(s, depth):
        raise NotAdmissible(f"{s} is not alpha-admissible to depth {depth}")
    n = 64
    while True:
        lo, hi = _value_one_bracket(s.prefix(n).digits, m, tol)
        if hi - lo <= tol:
            return IntervalBase(lo, hi)
        n *= 2
        if n > 1 << 16:
            raise UndecidedAtDepth("generator base did not converge")


def base_of_beta(w, m, tol=DEFAULT_TOL):
    """The base q with beta(q) = w 0^inf for a finite word w."""
    s = w.then_zeros()
    if not is_beta_admissible(s):
        raise NotAdmissible(f"{s} is not beta-admissible")
    n = len(w)
    poly = poly_sub(_prefix_poly(w.digits), monomial(n))
    return root_in(poly, 1, m + 1, tol)


# --------------------------------------------------------------------------
# constants


def G(m):
    """The generalized golden ratio."""
    if m < 1:
        raise ValueError("m must be >= 1")
    k = m // 2
    if m % 2 == 0:
        return rational(k + 1)
    return root_in((-(k + 1), -(k + 1), 1), k + 1, k + 2)


def q_f(m, tol=DEFAULT_TOL):
    """Largest root of the defining quadratic (even m) or cubic (odd m)."""
    if m < 1:
        raise ValueError("m must be >= 1")
    k = m // 2
    if m % 2 == 0:
        poly = (-k, -(k + 1), 1)
    else:
        poly = (-(k + 1), 1, -(k + 2), 1)
    return largest_real_root(poly, (1, m + 1), tol)


def q_s(tol=DEFAULT_TOL):
    return largest_real_root((-1, -1, -2, 0, 1), (1, 2), tol)


def tribonacci(tol=DEFAULT_TOL):
    return largest_real_root((-1, -1, -1, 1), (1, 2), tol)


def golden():
    return G(1)


def q_KL(m, tol=DEFAULT_TOL):
    """Komornik-Loreti constant: alpha(q_KL) is Thue-Morse derived."""
    return base_of_alpha(thue_morse_stream(m), m, tol)


# --------------------------------------------------------------------------
# classification


def classify_base(q, m, depth=64):
    """U / Ubar / V / None for the base q, or UNDECIDED when unresolved at depth."""
    q.check_range(m)
    if q.exact and exact_sign((-(m + 1), 1), q) is Sign.ZERO:
        return VClass.U
    alpha = alpha_stream(q, m, depth)
    if isinstance(alpha, PeriodicStream):
        return classify_V_admissible(alpha, depth)
    return _classify_prefix(alpha)


def _classify_prefix(alpha):
    # a non-periodic alpha can only be U or fail outright; passing every
    # check to the known depth is therefore not a verdict
    n_known = alpha.known_length
    refl = alpha.reflect()
    for n in range(1, n_known // 2 + 1):
        t = alpha.shift(n)
        if lex_compare(t, alpha, n_known) is Order.GT or lex_compare(t, refl, n_known) is Order.LT:
            return VClass.NONE
    return VClass.UNDECIDED


# --------------------------------------------------------------------------
# components


@dataclass(frozen=True)
class Component:
    c0_minus: DigitWord
    q0: object
    q0_star: IntervalBase
    ladder: tuple = ()
    tol: Fraction = DEFAULT_TOL

    @property
    def m(self):
        return self.c0_minus.alphabet_max

    def c(self, level):
        return c_block(self.c0_minus, level)

    def extend(self, ladder_len):
        ladder = list(self.ladder)
        for level in range(len(ladder) + 1, ladder_len + 1):
            ladder.append(_ladder_base(self.c0_minus, level, self.tol))
        _check_ladder(ladder, self.q0_star)
        return replace(self, ladder=tuple(ladder))


def M(m):
    return m // 2 + 1


def first_generator(m):
    """c0^- of the first component (M, q_KL): the single digit k = floor(m/2)."""
    return DigitWord((m // 2,), m)


def _ladder_base(c0_minus, level, tol):
    c = c_block(c0_minus, level)
    q = base_of_beta(c, c0_minus.alphabet_max, tol)
    if q.exact:
        got = greedy_expand(1, q, c0_minus.alphabet_max, len(c) + 4)
        if got.digits != c.digits + (0,) * 4:
            raise LadderNotMonotone(f"beta(q_{level}) = {got}, expected {c}0^inf")
    return q


def _check_ladder(ladder, q0_star):
    for a, b in zip(ladder, ladder[1:]):
        if not a.interval(96).hi < b.interval(96).lo:
            raise LadderNotMonotone(f"ladder not increasing: {a} then {b}")
    if ladder and not ladder[-1].interval(96).lo < q0_star.hi:
        raise LadderNotMonotone("ladder reached the right endpoint")


def component_from_generator(c0_minus, m, ladder_len=3, tol=DEFAULT_TOL):
    """Component (q0, q0*) generated by c0_minus, with ``ladder_len`` rungs."""
    if c0_minus.alphabet_max != m:
        raise ValueError("generator alphabet differs from m")
    bump_last(c0_minus, "+")
    if any(c0_minus.digits):
        s = c0_minus.periodic()
        if not is_alpha_admissible(s):
            raise NotAdmissible(f"({c0_minus})^inf is not alpha-admissible")
        if c0_minus.periodic().period != c0_minus.digits:
            raise NotAdmissible(f"{c0_minus} is not the smallest period block")
        q0 = base_of_alpha(s, m, tol)
    else:
        if len(c0_minus) != 1:
            raise NotAdmissible("the trivial generator is the single digit 0")
        q0 = rational(1)
    q0_star = base_of_alpha(c_limit_stream(c0_minus), m, tol)
    comp = Component(c0_minus, q0, q0_star, (), tol)
    return comp.extend(ladder_len)
