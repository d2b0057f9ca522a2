"""Exact and certified arithmetic.

A base is a ``Rational``, an ``Algebraic`` number (integer polynomial plus an
isolating interval) or an ``IntervalBase`` (a certified enclosure of a number
we cannot write down, such as the Komornik-Loreti constant).

Exact bases expose a number field ``Q(q)``; elements are coefficient tuples
reduced modulo the minimal polynomial, so sign tests are exact.  Everything
else goes through rational intervals with outward rounding.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

from bexp.errors import BaseOutOfRange, NoRootFound, SignContractViolated, UndecidedAtDepth

DEFAULT_BITS = 128
DEFAULT_DEPTH = 64
DEFAULT_TOL = Fraction(1, 2 ** 64)
SCAN_CELLS = 1024


class Sign(enum.IntEnum):
    NEG = -1
    ZERO = 0
    POS = 1


def _frac(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    return Fraction(x)


# --------------------------------------------------------------------------
# intervals


@dataclass(frozen=True)
class Interval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", _frac(self.lo))
        object.__setattr__(self, "hi", _frac(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, x):
        x = _frac(x)
        return cls(x, x)

    @property
    def width(self):
        return self.hi - self.lo

    @property
    def mid(self):
        return (self.lo + self.hi) / 2

    def contains(self, x):
        x = _frac(x)
        return self.lo <= x <= self.hi

    def __contains__(self, x):
        return self.contains(x)

    def intersects(self, other):
        return self.lo <= other.hi and other.lo <= self.hi

    def _coerce(self, other):
        return other if isinstance(other, Interval) else Interval.point(other)

    def __add__(self, other):
        other = self._coerce(other)
        return Interval(self.lo + other.lo, self.hi + other.hi)

    __radd__ = __add__

    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        p = (self.lo * other.lo, self.lo * other.hi, self.hi * other.lo, self.hi * other.hi)
        return Interval(min(p), max(p))

    __rmul__ = __mul__

    def inverse(self):
        if self.lo <= 0 <= self.hi:
            raise ZeroDivisionError("interval contains zero")
        return Interval(1 / self.hi, 1 / self.lo)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        if self.lo >= 0:
            return Interval(self.lo ** n, self.hi ** n)
        result = Interval.point(1)
        for _ in range(n):
            result = result * self
        return result

    def round_out(self, bits):
        """Outward rounding to a dyadic grid, only when denominators grow large."""
        limit = 1 << (bits + 32)
        if self.lo.denominator <= limit and self.hi.denominator <= limit:
            return self
        scale = 1 << bits
        return Interval(Fraction(math.floor(self.lo * scale), scale),
                        Fraction(math.ceil(self.hi * scale), scale))

    def sign(self):
        if self.lo > 0:
            return Sign.POS
        if self.hi < 0:
            return Sign.NEG
        if self.lo == self.hi == 0:
            return Sign.ZERO
        return None


# --------------------------------------------------------------------------
# polynomials (ascending coefficient tuples)


def poly_trim(p):
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return tuple(p)


def poly_add(a, b):
    n = max(len(a), len(b))
    return poly_trim(tuple((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)))


def poly_sub(a, b):
    return poly_add(a, tuple(-x for x in b))


def poly_mul(a, b):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return poly_trim(out)


def poly_eval(p, x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def poly_eval_interval(p, iv):
    acc = Interval.point(0)
    for c in reversed(p):
        acc = acc * iv + c
    return acc


def poly_rem(a, monic):
    """Remainder of ``a`` modulo a monic polynomial."""
    a = [Fraction(x) for x in a]
    d = len(monic) - 1
    for i in range(len(a) - 1, d - 1, -1):
        c = a[i]
        if c:
            for j in range(d + 1):
                a[i - d + j] -= c * monic[j]
    return poly_trim(a[:d])


def monomial(k):
    return (0,) * k + (1,)


def integer_poly(p):
    """Scale a rational polynomial to coprime integer coefficients."""
    p = [Fraction(c) for c in poly_trim(p)]
    if not p:
        return ()
    den = 1
    for c in p:
        den = den * c.denominator // math.gcd(den, c.denominator)
    ints = [int(c * den) for c in p]
    g = 0
    for c in ints:
        g = math.gcd(g, c)
    if ints[-1] < 0:
        g = -g
    return tuple(c // g for c in ints)


# --------------------------------------------------------------------------
# bases


class Base:
    """A real number used as an expansion base."""

    exact = True

    def interval(self, bits=DEFAULT_BITS):
        raise NotImplementedError

    def field(self):
        raise TypeError(f"{type(self).__name__} has no exact field arithmetic")

    def __float__(self):
        iv = self.interval(64)
        return float(iv.mid)

    def check_range(self, m):
        """Raise BaseOutOfRange unless 1 < q <= m+1 (certified)."""
        _check_base(self)
        if self.exact:
            if exact_sign((-(m + 1), 1), self) is Sign.POS:
                raise BaseOutOfRange(f"base {self} exceeds {m + 1}")
        elif self.interval().lo > m + 1:
            raise BaseOutOfRange(f"base {self} exceeds {m + 1}")


@dataclass(frozen=True)
class Rational(Base):
    value: Fraction

    def __post_init__(self):
        object.__setattr__(self, "value", _frac(self.value))

    def interval(self, bits=DEFAULT_BITS):
        return Interval.point(self.value)

    def field(self):
        return NumberField((-self.value, Fraction(1)), self)

    def __str__(self):
        return str(self.value)

    def to_json(self):
        return {"kind": "rational", "value": str(self.value)}


@dataclass(frozen=True)
class Algebraic(Base):
    """The unique root of an irreducible integer polynomial in ``[lo, hi]``."""

    coeffs: tuple
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))
        object.__setattr__(self, "lo", _frac(self.lo))
        object.__setattr__(self, "hi", _frac(self.hi))

    def __eq__(self, other):
        if not isinstance(other, Algebraic):
            return NotImplemented
        if self.coeffs != other.coeffs:
            return False
        return Interval(self.lo, self.hi).intersects(Interval(other.lo, other.hi))

    def __hash__(self):
        return hash(self.coeffs)

    @property
    def monic(self):
        lead = Fraction(self.coeffs[-1])
        return tuple(Fraction(c) / lead for c in self.coeffs)

    def interval(self, bits=DEFAULT_BITS):
        lo, hi = _refine(self, Fraction(1, 2 ** bits))
        return Interval(lo, hi)

    def refined(self, width):
        lo, hi = _refine(self, _frac(width))
        return Algebraic(self.coeffs, lo, hi)

    def field(self):
        return NumberField(self.monic, self)

    def __str__(self):
        return f"root:{','.join(map(str, self.coeffs))}:{self.lo},{self.hi}"

    def to_json(self):
        return {"kind": "algebraic", "coeffs": list(self.coeffs),
                "interval": [str(self.lo), str(self.hi)],
                "approx": decimal_string(self.interval(80).mid, 20)}


@dataclass(frozen=True)
class IntervalBase(Base):
    lo: Fraction
    hi: Fraction
    precision_bits: int = DEFAULT_BITS
    exact = False

    def __post_init__(self):
        object.__setattr__(self, "lo", _frac(self.lo))
        object.__setattr__(self, "hi", _frac(self.hi))
        if self.lo > self.hi:
            raise ValueError("interval base with lower > upper")

    def interval(self, bits=DEFAULT_BITS):
        return Interval(self.lo, self.hi)

    @property
    def width(self):
        return self.hi - self.lo

    def __str__(self):
        return f"[{decimal_string(self.lo, 20)}, {decimal_string(self.hi, 20)}]"

    def to_json(self):
        return {"kind": "interval", "lower": str(self.lo), "upper": str(self.hi),
                "precision_bits": self.precision_bits}


def rational(x):
    return Rational(_frac(x))


_REFINED = {}


def _sign_at(coeffs, x):
    v = poly_eval(coeffs, x)
    return (v > 0) - (v < 0)


def _refine(alg, width):
    key = alg.coeffs
    lo, hi = alg.lo, alg.hi
    cached = _REFINED.get(key)
    if cached is not None:
        clo, chi = cached
        if clo >= lo and chi <= hi and chi - clo < hi - lo:
            lo, hi = clo, chi
    if hi - lo <= width:
        return lo, hi
    s_lo = _sign_at(alg.coeffs, lo)
    while hi - lo > width:
        mid = (lo + hi) / 2
        s = _sign_at(alg.coeffs, mid)
        if s == 0:
            lo = hi = mid
            break
        if s == s_lo:
            lo = mid
        else:
            hi = mid
    _REFINED[key] = (lo, hi)
    return lo, hi


def algebraic(coeffs, lo, hi):
    """Build the base defined by ``coeffs`` (ascending) with a root in [lo, hi].

    The polynomial is factored (sympy) and replaced by the irreducible factor
    vanishing in the interval; a linear factor yields a ``Rational``.
    """
    import sympy

    lo, hi = _frac(lo), _frac(hi)
    coeffs = integer_poly(coeffs)
    if len(coeffs) < 2:
        raise NoRootFound("constant polynomial has no root")
    t = sympy.Symbol("t")
    poly = sympy.Poly(list(reversed(coeffs)), t)
    found = []
    for factor, _mult in poly.factor_list()[1]:
        n = factor.count_roots(sympy.Rational(lo.numerator, lo.denominator),
                               sympy.Rational(hi.numerator, hi.denominator))
        if n:
            found.append((factor, n))
    if len(found) != 1 or found[0][1] != 1:
        raise NoRootFound(f"polynomial {coeffs} lacks a unique root in [{lo}, {hi}]")
    factor = found[0][0]
    fc = tuple(int(c) for c in reversed(factor.all_coeffs()))
    fc = integer_poly(fc)
    if len(fc) == 2:
        return Rational(Fraction(-fc[0], fc[1]))
    # shrink a closed interval with a root on the boundary is impossible here:
    # an irreducible factor of degree >= 2 has no rational roots
    return Algebraic(fc, lo, hi)


# --------------------------------------------------------------------------
# exact number fields


class NumberField:
    """Q(q) for an exact base, elements reduced modulo the minimal polynomial."""

    def __init__(self, monic, base):
        self.monic = tuple(Fraction(c) for c in monic)
        self.degree = len(self.monic) - 1
        self.base = base

    def element(self, poly):
        return poly_rem(poly, self.monic) if len(poly) > self.degree else poly_trim(
            tuple(Fraction(c) for c in poly))

    def const(self, c):
        return poly_trim((Fraction(c),))

    def add(self, a, b):
        return poly_add(a, b)

    def sub(self, a, b):
        return poly_sub(a, b)

    def mul(self, a, b):
        return self.element(poly_mul(a, b))

    def mul_q(self, a):
        return self.element((0,) + tuple(a)) if a else ()

    def sign(self, a):
        a = poly_trim(a)
        if not a:
            return Sign.ZERO
        if self.degree == 1:
            v = a[0]
            return Sign.POS if v > 0 else Sign.NEG
        bits = 64
        while True:
            s = poly_eval_interval(a, self.base.interval(bits)).sign()
            if s is not None:
                return s
            bits *= 2

    def enclose(self, a, bits=DEFAULT_BITS):
        a = poly_trim(a)
        if not a:
            return Interval.point(0)
        if self.degree == 1:
            return Interval.point(a[0])
        return poly_eval_interval(a, self.base.interval(bits + 16))

    def compare(self, a, b):
        return self.sign(self.sub(a, b))

    def div(self, a, b):
        b = poly_trim(b)
        if not b:
            raise ZeroDivisionError("division by zero in Q(q)")
        if self.degree == 1:
            return self.const((a[0] if a else 0) / b[0])
        import sympy

        t = sympy.Symbol("t")
        inv = sympy.invert(sympy.Poly(list(reversed(b)), t, domain="QQ"),
                           sympy.Poly(list(reversed(self.monic)), t, domain="QQ"))
        coeffs = tuple(Fraction(int(c.p), int(c.q)) for c in reversed(inv.all_coeffs()))
        return self.mul(a, coeffs)


def exact_sign(expr, q):
    """Sign of the polynomial ``expr`` (ascending rational coefficients) at q."""
    if not q.exact:
        raise TypeError("exact_sign needs a Rational or Algebraic base")
    f = q.field()
    return f.sign(f.element(tuple(Fraction(c) for c in expr)))


# --------------------------------------------------------------------------
# certified values and series


@dataclass(frozen=True)
class CertifiedValue:
    lower: Fraction
    upper: Fraction
    depth_used: int = 0

    def __post_init__(self):
        object.__setattr__(self, "lower", _frac(self.lower))
        object.__setattr__(self, "upper", _frac(self.upper))
        if self.lower > self.upper:
            raise ValueError("lower > upper")

    @classmethod
    def exact_value(cls, x, depth_used=0):
        return cls(x, x, depth_used)

    @classmethod
    def from_interval(cls, iv, depth_used=0):
        return cls(iv.lo, iv.hi, depth_used)

    @property
    def width(self):
        return self.upper - self.lower

    @property
    def mid(self):
        return (self.lower + self.upper) / 2

    @property
    def is_exact(self):
        return self.lower == self.upper

    def contains(self, x):
        return self.lower <= _frac(x) <= self.upper

    def contains_zero(self):
        return self.lower <= 0 <= self.upper

    def interval(self):
        return Interval(self.lower, self.upper)

    def sign(self):
        return self.interval().sign()

    def __str__(self):
        return f"[{decimal_string(self.lower, 30, 'floor')}, {decimal_string(self.upper, 30, 'ceil')}]"


def decimal_string(x, digits=20, rounding="nearest"):
    """Decimal rendering of a rational with ``digits`` fractional digits."""
    x = _frac(x)
    if x.denominator == 1:
        return str(x.numerator)
    scale = 10 ** digits
    if rounding == "floor":
        n = math.floor(x * scale)
    elif rounding == "ceil":
        n = math.ceil(x * scale)
    else:
        n = round(x * scale)
    sign = "-" if n < 0 else ""
    n = abs(n)
    whole, frac = divmod(n, scale)
    text = f"{sign}{whole}.{frac:0{digits}d}".rstrip("0")
    return text[:-1] if text.endswith(".") else text


def series_rational_function(s):
    """(N, D) integer polynomials with (s)_t = N(t)/D(t) for periodic ``s``."""
    pre, per = s.preperiod, s.period
    p, k = len(pre), len(per)
    a = tuple(reversed(pre)) or (0,)
    b = tuple(reversed(per))
    tk1 = poly_sub(monomial(k), (1,))
    num = poly_add(poly_mul(a, tk1), b)
    den = poly_mul(monomial(p), tk1)
    return num, den


def _check_base(q):
    iv = q.interval(64)
    if iv.hi <= 1:
        raise BaseOutOfRange(f"base {q} must exceed 1")
    if q.exact:
        if exact_sign((-1, 1), q) is not Sign.POS:
            raise BaseOutOfRange(f"base {q} must exceed 1")
    elif iv.lo <= 1:
        raise BaseOutOfRange(f"interval base {q} is not certified > 1")


def field_value(s, q):
    """Exact value of a periodic stream at an exact base as (num, den) field elements."""
    f = q.field()
    num, den = series_rational_function(s)
    return f, f.element(num), f.element(den)


def eval_series(s, q, depth=DEFAULT_DEPTH, bits=DEFAULT_BITS):
    """Certified enclosure of sum c_i q^-i."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    _check_base(q)
    if getattr(s, "is_periodic", False) and q.exact:
        f, num, den = field_value(s, q)
        if f.degree == 1:
            return CertifiedValue.exact_value(num[0] / den[0] if num else Fraction(0), 0)
        if not num:
            return CertifiedValue.exact_value(0, 0)
        quotient = f.div(num, den)
        if len(quotient) <= 1:
            # the value lies in Q, e.g. (10)^inf at the golden ratio
            return CertifiedValue.exact_value(quotient[0] if quotient else 0, 0)
        iv = f.enclose(num, bits) / f.enclose(den, bits)
        return CertifiedValue.from_interval(iv.round_out(bits), 0)
    n = int(min(depth, s.known_length))
    digits = s.digits(1, n + 1)
    qi = q.interval(bits + 16)
    iq = qi.inverse().round_out(bits + 16)
    acc = Interval.point(0)
    for c in reversed(digits):
        acc = ((acc + c) * iq).round_out(bits + 16)
    m = s.alphabet_max
    tail_hi = (m * (iq ** n) / (qi - 1)).hi
    return CertifiedValue.from_interval(Interval(acc.lo, acc.hi + tail_hi).round_out(bits), n)


def partial_sum(digits, q):
    """Exact finite sum at a rational base."""
    q = _frac(q)
    acc = Fraction(0)
    for c in reversed(digits):
        acc = (acc + c) / q
    return acc


# --------------------------------------------------------------------------
# root finding


def largest_real_root(poly, search_interval, tol=DEFAULT_TOL):
    """Largest root of ``poly`` in the closed search interval.

    The interval is cut into ``SCAN_CELLS`` cells scanned from the right; the
    first cell with a sign change is isolated and the root returned as an
    exact base refined to width ``tol``.
    """
    lo, hi = (_frac(x) for x in search_interval)
    poly = integer_poly(poly)
    if not poly:
        raise NoRootFound("zero polynomial")
    step = (hi - lo) / SCAN_CELLS
    right = hi
    s_right = _sign_at(poly, right)
    if s_right == 0:
        return rational(right)
    for i in range(SCAN_CELLS - 1, -1, -1):
        left = lo + step * i
        s_left = _sign_at(poly, left)
        if s_left == 0:
            return rational(left)
        if s_left != s_right:
            root = algebraic(poly, left, right)
            if isinstance(root, Algebraic):
                return root.refined(tol)
            return root
        right, s_right = left, s_left
    raise NoRootFound(f"no sign change of {poly} on [{lo}, {hi}] at {SCAN_CELLS} cells")


def root_in(poly, lo, hi, tol=DEFAULT_TOL):
    """The root of ``poly`` known to be unique in [lo, hi] (bisection on exact signs)."""
    lo, hi = _frac(lo), _frac(hi)
    poly = integer_poly(poly)
    s_lo, s_hi = _sign_at(poly, lo), _sign_at(poly, hi)
    if s_lo == 0:
        return rational(lo)
    if s_hi == 0:
        return rational(hi)
    if s_lo == s_hi:
        raise NoRootFound(f"no sign change on [{lo}, {hi}]")
    while hi - lo > Fraction(1, 2 ** 20):
        mid = (lo + hi) / 2
        s = _sign_at(poly, mid)
        if s == 0:
            return rational(mid)
        if s == s_lo:
            lo = mid
        else:
            hi = mid
    root = algebraic(poly, lo, hi)
    return root.refined(tol) if isinstance(root, Algebraic) else root


def _as_base(x):
    return x if isinstance(x, Base) else rational(x)


def monotone_bisect(f, a, b, tol=DEFAULT_TOL):
    """Zero of an increasing function given by certified enclosures.

    ``f`` maps a Base to a CertifiedValue.  Returns the exact endpoint when
    f vanishes exactly there, otherwise an ``IntervalBase`` of width <= tol.
    """
    a, b = _as_base(a), _as_base(b)
    fa, fb = f(a), f(b)
    if fa.upper > 0 or fb.lower < 0:
        raise SignContractViolated(f"f({a}) = {fa} and f({b}) = {fb} do not bracket 0")
    if fa.lower == fa.upper == 0:
        return a
    if fb.lower == fb.upper == 0:
        return b
    lo, hi = a.interval(DEFAULT_BITS).hi, b.interval(DEFAULT_BITS).lo
    lo_bound, hi_bound = a.interval(DEFAULT_BITS).lo, b.interval(DEFAULT_BITS).hi
    while hi - lo > tol:
        mid = (lo + hi) / 2
        v = f(rational(mid))
        if v.upper < 0:
            lo = lo_bound = mid
        elif v.lower > 0:
            hi = hi_bound = mid
        elif v.lower == v.upper == 0:
            return rational(mid)
        else:
            # enclosure straddles zero: probe the quarter points
            moved = False
            for probe in ((lo + mid) / 2, (mid + hi) / 2):
                w = f(rational(probe))
                if w.upper < 0 and probe > lo:
                    lo = lo_bound = probe
                    moved = True
                elif w.lower > 0 and probe < hi:
                    hi = hi_bound = probe
                    moved = True
            if not moved:
                raise UndecidedAtDepth(
                    f"enclosures straddle 0 on [{decimal_string(lo)}, {decimal_string(hi)}]")
    return IntervalBase(lo_bound, hi_bound)
