"""Greedy and quasi-greedy expansions, expansion counting and the unique-expansion test.

Digit choices at exact bases are made with exact sign tests in Q(q).  At an
``IntervalBase`` the digits come from interval arithmetic and an ambiguous
digit raises ``UndecidedAtDepth``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from bexp.errors import OutOfDomain, UndecidedAtDepth, ZeroInput
from bexp.numeric import Interval, Sign, field_value
from bexp.words import (DigitWord, KnownPrefix, Order, PeriodicStream, is_alpha_admissible,
                        lex_compare)

COUNT_DEPTH = 20


@dataclass(frozen=True)
class ExpansionCount:
    kind: str  # "Exactly" or "AtLeast"
    n: int
    depth_used: int

    @property
    def exact(self):
        return self.kind == "Exactly"

    def __str__(self):
        return f"{self.kind}({self.n})"


def _element(f, x):
    """x as a field element: a number or a tuple of coefficients in q."""
    if isinstance(x, tuple):
        return f.element(tuple(Fraction(c) for c in x))
    return f.const(Fraction(x))


def _check_domain(f, r, m, allow_zero=True):
    # 0 <= x <= m/(q-1)  <=>  x >= 0 and x*(q-1) - m <= 0
    s = f.sign(r)
    if s is Sign.NEG:
        raise OutOfDomain("x is negative")
    if s is Sign.ZERO and not allow_zero:
        raise ZeroInput("0 has no infinite expansion")
    top = f.sub(f.sub(f.mul_q(r), r), f.const(m))
    if f.sign(top) is Sign.POS:
        raise OutOfDomain(f"x exceeds m/(q-1) for m={m}")


def _expand_exact(x, q, m, depth, strict):
    f = q.field()
    r = _element(f, x)
    _check_domain(f, r, m, allow_zero=not strict)
    if f.degree == 1:
        return _expand_rational(r[0] if r else Fraction(0), f.element((0, 1))[0], m, depth, strict)
    digits = []
    for _ in range(depth):
        qr = f.mul_q(r)
        c = _largest_digit(f, qr, m, strict)
        digits.append(c)
        r = f.sub(qr, f.const(c))
    return DigitWord(tuple(digits), m)


def _expand_rational(r, q, m, depth, strict):
    digits = []
    for _ in range(depth):
        qr = q * r
        c = math.floor(qr)
        if strict and c == qr:
            c -= 1
        c = max(0, min(m, c))
        digits.append(c)
        r = qr - c
    return DigitWord(tuple(digits), m)


def _largest_digit(f, qr, m, strict):
    """Largest c in [0, m] with c <= qr (or c < qr when strict)."""
    if f.degree == 1:
        v = qr[0] if qr else Fraction(0)
        c = math.floor(v)
        if strict and c == v:
            c -= 1
        return max(0, min(m, c))
    guess = f.enclose(qr, 64)
    c = max(0, min(m, math.floor(guess.hi)))
    while c > 0:
        s = f.sign(f.sub(qr, f.const(c)))
        if s is Sign.POS or (s is Sign.ZERO and not strict):
            return c
        c -= 1
    return 0


def _expand_interval(x, q, m, depth, strict, bits=256):
    qi = q.interval(bits)
    r = Interval.point(Fraction(x))
    digits = []
    for i in range(depth):
        qr = r * qi
        lo_c = math.floor(qr.lo)
        hi_c = math.floor(qr.hi)
        if strict:
            lo_c = math.ceil(qr.lo) - 1
            hi_c = math.ceil(qr.hi) - 1
        lo_c, hi_c = max(0, min(m, lo_c)), max(0, min(m, hi_c))
        if lo_c != hi_c:
            raise UndecidedAtDepth(f"digit {i + 1} is ambiguous at interval base {q}",)
        digits.append(lo_c)
        r = (qr - lo_c).round_out(bits)
    return DigitWord(tuple(digits), m)


def greedy_expand(x, q, m, depth):
    """The first ``depth`` digits of the greedy q-expansion of x."""
    if q.exact:
        return _expand_exact(x, q, m, depth, strict=False)
    return _expand_interval(x, q, m, depth, strict=False)


def quasi_greedy_expand(x, q, m, depth):
    """The first ``depth`` digits of the quasi-greedy q-expansion of x."""
    if q.exact:
        return _expand_exact(x, q, m, depth, strict=True)
    if Fraction(x) == 0:
        raise ZeroInput("0 has no infinite expansion")
    return _expand_interval(x, q, m, depth, strict=True)


def count_expansions(x, q, m, depth=COUNT_DEPTH, cap=10, trace=None):
    """Count q-expansions of x by exhaustive branching to ``depth``.

    A branch ends when its remainder is 0 (forced 0^inf), m/(q-1) (forced
    m^inf), or repeats after a run of steps with a single feasible digit
    (forced periodic tail).  Branches still open at ``depth`` each count once
    and make the result ``AtLeast``.  ``trace``, if a list, receives one
    record per leaf.
    """
    f = q.field()
    r0 = _element(f, x)
    _check_domain(f, r0, m)
    ops = _RationalOps(f, m) if f.degree == 1 else _FieldOps(f, m)
    leaves = 0
    truncated = False

    # stack entries: remainder, digits so far, remainders seen since the last branching
    stack = [(ops.lift(r0), (), frozenset())]
    while stack:
        r, prefix, chain = stack.pop()
        if ops.is_zero(r):
            st = "forced 0^inf"
        elif ops.at_top(r):
            st = "forced m^inf"
        elif r in chain:
            st = "forced periodic"
        elif len(prefix) >= depth:
            st = "open at depth"
            truncated = True
        else:
            st = None
        if st is not None:
            leaves += 1
            if trace is not None:
                trace.append({"branch_prefix": _join(prefix, m), "status": st})
            if leaves >= cap:
                return ExpansionCount("AtLeast", cap, depth)
            continue
        children = ops.children(r)
        if len(children) == 1:
            c, y = children[0]
            stack.append((y, prefix + (c,), chain | {r}))
        else:
            # larger digits are popped first, so the greedy branch leads
            stack.extend((y, prefix + (c,), frozenset()) for c, y in children)
    return ExpansionCount("AtLeast" if truncated else "Exactly", leaves, depth)


class _FieldOps:
    """Branching arithmetic in Q(q)."""

    def __init__(self, f, m):
        self.f, self.m = f, m
        self.top = f.const(m)

    def lift(self, r):
        return r

    def is_zero(self, r):
        return self.f.sign(r) is Sign.ZERO

    def _excess(self, r):
        f = self.f
        return f.sign(f.sub(f.sub(f.mul_q(r), r), self.top))

    def at_top(self, r):
        return self._excess(r) is Sign.ZERO

    def children(self, r):
        """Feasible (digit, remainder): 0 <= q r - c <= m/(q-1)."""
        f = self.f
        qr = f.mul_q(r)
        out = []
        for c in range(self.m + 1):
            y = f.sub(qr, f.const(c))
            if f.sign(y) is Sign.NEG:
                break
            if self._excess(y) is not Sign.POS:
                out.append((c, y))
        return out


class _RationalOps:
    """The same rules with plain fractions at a rational base."""

    def __init__(self, f, m):
        self.q = f.element((0, 1))[0] if f.degree == 1 and len(f.element((0, 1))) else Fraction(0)
        self.m = m
        self.top = Fraction(m) / (self.q - 1)

    def lift(self, r):
        return r[0] if r else Fraction(0)

    def is_zero(self, r):
        return r == 0

    def at_top(self, r):
        return r == self.top

    def children(self, r):
        qr = self.q * r
        out = []
        for c in range(self.m + 1):
            y = qr - c
            if y < 0:
                break
            if y <= self.top:
                out.append((c, y))
        return out


def _join(digits, m):
    return ("." if m > 9 else "").join(map(str, digits))


# --------------------------------------------------------------------------
# alpha(q) as a stream


@lru_cache(maxsize=512)
def alpha_stream(q, m, depth=64):
    """alpha(q) as an exact periodic stream when one is detected, else a known prefix.

    Periodic candidates with preperiod + period <= depth/2 that agree with the
    computed prefix are verified exactly: admissible, infinite and of value 1.
    """
    prefix = quasi_greedy_expand(1, q, m, depth).digits
    if q.exact:
        found = detect_periodic(prefix, q, m)
        if found is not None:
            return found
    return KnownPrefix(prefix, m)


def detect_periodic(prefix, q, m, value=1):
    limit = len(prefix) // 2
    candidates = []
    for per in range(1, limit + 1):
        # smallest preperiod after which the prefix repeats with this period
        pre = len(prefix) - per
        while pre > 0 and prefix[pre - 1] == prefix[pre - 1 + per]:
            pre -= 1
        if pre + per <= limit:
            candidates.append((pre + per, per, pre))
    for _, per, pre in sorted(candidates):
        cand = PeriodicStream(prefix[:pre], prefix[pre:pre + per], m)
        if has_value(cand, q, value) and (value != 1 or is_alpha_admissible(cand)):
            return cand
    return None


def has_value(s, q, value):
    """Exact test (s)_q == value for a periodic stream at an exact base."""
    f, num, den = field_value(s, q)
    return f.sign(f.sub(num, f.mul(den, f.const(Fraction(value))))) is Sign.ZERO


# --------------------------------------------------------------------------
# unique expansions


def unique_verdict(b, alpha, depth=64):
    """Three-valued uniqueness test on shifted tails: True, False, or None when unresolved at depth."""
    m = b.alphabet_max
    if isinstance(b, PeriodicStream):
        shifts = range(1, b.cycle_bound + 1)
        # a finite expansion with a nonzero digit is never unique
        if not b.is_infinite and any(b.preperiod):
            return False
    else:
        shifts = range(1, depth + 1)
    undecided = False
    all_m = all_zero = True
    for n in shifts:
        try:
            d = b.digit_at(n)
        except UndecidedAtDepth:
            undecided = True
            break
        all_m = all_m and d == m
        all_zero = all_zero and d == 0
        t = b.shift(n)
        checks = []
        if not all_m:
            checks.append(t)
        if not all_zero:
            checks.append(t.reflect())
        for u in checks:
            order = lex_compare(u, alpha, depth)
            if order in (Order.GT, Order.EQ):
                return False
            if order is Order.EQ_TO_DEPTH:
                undecided = True
    return None if undecided else True


def is_unique_expansion(b, q, m, depth=64):
    """Whether ``b`` is the unique q-expansion of its value."""
    if b.alphabet_max != m:
        raise ValueError("stream alphabet differs from m")
    verdict = unique_verdict(b, alpha_stream(q, m, max(depth, 8)), depth)
    if verdict is None:
        raise UndecidedAtDepth(f"uniqueness of {b} at {q} is unresolved at depth {depth}")
    return verdict


def in_A_prime(b, q, m, depth=64):
    """Unique expansion whose first digit is below alpha_1(q)."""
    alpha = alpha_stream(q, m, max(depth, 8))
    if b.digit_at(1) >= alpha.digit_at(1):
        return False
    return is_unique_expansion(b, q, m, depth)


def a_prime_verdict(b, q, m, depth=64):
    alpha = alpha_stream(q, m, max(depth, 8))
    if b.digit_at(1) >= alpha.digit_at(1):
        return False
    return unique_verdict(b, alpha, depth)
