"""Two-expansion machinery: the pair function f_{c,d}, its case split, certified
roots q_{c,d} and the explicit pair constructions.

For c, d in A'_q,

    f_{c,d}(t) = (1c)_t + (md)_t - (m^inf)_t = ((m+1)(c+d))_t - (m^inf)_t,

and q carries a point with exactly two expansions iff f_{c,d}(q) = 0 for
such a pair.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

from bexp.errors import (GoldenRatioExcluded, NotAdmissible, NotInAPrime, PrefixMismatch,
                         ResidualTooLarge, SignContractViolated, UndecidedAtDepth)
from bexp.expansions import a_prime_verdict
from bexp.numeric import (DEFAULT_BITS, Algebraic, CertifiedValue, IntervalBase, field_value,
                          Rational, _check_base, eval_series, monotone_bisect,
                          poly_add, poly_mul, poly_sub, rational, root_in,
                          series_rational_function)
from bexp.spectra import G, base_of_alpha, q_f
from bexp.words import (DigitWord, Order, PeriodicStream, VClass, bump_last, classify_V_admissible,
                        digit_sum, is_alpha_admissible, lex_compare)

RESIDUAL_TOL = Fraction(1, 2 ** 40)
A_PRIME_DEPTH = 64


class Case(enum.Enum):
    POSITIVE = "PositiveAtQ"
    MONOTONE = "MonotoneOnRange"


@dataclass(frozen=True)
class PairFunction:
    c: object
    d: object
    m: int

    def __post_init__(self):
        if self.c.alphabet_max != self.m or self.d.alphabet_max != self.m:
            raise ValueError("pair streams must use the alphabet {0..m}")

    @property
    def is_periodic(self):
        return isinstance(self.c, PeriodicStream) and isinstance(self.d, PeriodicStream)

    def swapped(self):
        return PairFunction(self.d, self.c, self.m)

    def digit_sum(self):
        return digit_sum(self.c, self.d)


@dataclass(frozen=True)
class B2Certificate:
    pair: PairFunction
    q: object
    residual: CertifiedValue
    a_prime_depth: int
    construction: str = "Manual"
    notes: tuple = ()

    def to_json(self):
        return {
            "m": self.pair.m,
            "q": self.q.to_json(),
            "c": self.pair.c.literal(),
            "d": self.pair.d.literal(),
            "residual": [str(self.residual.lower), str(self.residual.upper)],
            "construction": self.construction,
            "depths": {"a_prime": self.a_prime_depth, "series": self.residual.depth_used},
            "notes": list(self.notes),
        }


# --------------------------------------------------------------------------
# evaluation


def f_polynomials(p, form="3.3"):
    """(numerator, denominator) integer polynomials of f for a periodic pair.

    Both forms give the same rational function; the denominator is positive
    for t > 1, so the numerator carries the sign.
    """
    m = p.m
    t_minus_1 = (-1, 1)
    if form == "3.3":
        nc, dc = series_rational_function(p.c)
        nd, dd = series_rational_function(p.d)
        den_cd = poly_mul(dc, dd)
        inner = poly_add(poly_add(poly_mul((m + 1,), den_cd), poly_mul(nc, dd)), poly_mul(nd, dc))
        num = poly_sub(poly_mul(t_minus_1, inner), poly_mul((0, m), den_cd))
        den = poly_mul((0, 1), poly_mul(t_minus_1, den_cd))
    else:
        ns, ds = series_rational_function(p.digit_sum())
        inner = poly_add(poly_mul((m + 1,), ds), ns)
        num = poly_sub(poly_mul(t_minus_1, inner), poly_mul((0, m), ds))
        den = poly_mul((0, 1), poly_mul(t_minus_1, ds))
    return num, den


def _exact_value(num, den, t, bits):
    f = t.field()
    n, d = f.element(num), f.element(den)
    if f.degree == 1:
        return CertifiedValue.exact_value((n[0] if n else 0) / d[0])
    if not n:
        return CertifiedValue.exact_value(0)
    iv = f.enclose(n, bits) / f.enclose(d, bits)
    return CertifiedValue.from_interval(iv.round_out(bits))


def _interval_value(p, t, depth, bits, form):
    m = p.m
    ti = t.interval(bits + 16)
    top = m / (ti - 1)
    if form == "3.3":
        cv = eval_series(p.c, t, depth, bits).interval()
        dv = eval_series(p.d, t, depth, bits).interval()
        iv = (1 + cv) / ti + (m + dv) / ti - top
        used = max(eval_series(p.c, t, depth, bits).depth_used, 0)
    else:
        sv = eval_series(p.digit_sum(), t, depth, bits)
        iv = (m + 1 + sv.interval()) / ti - top
        used = sv.depth_used
    return CertifiedValue.from_interval(iv.round_out(bits), used)


def f_form(p, t, form, depth=64, bits=DEFAULT_BITS):
    """f at t by one form only ("3.3": separate series, "3.4": digit sum)."""
    _check_base(t)
    s = p.digit_sum()
    if t.exact and (p.is_periodic if form == "3.3" else isinstance(s, PeriodicStream)):
        num, den = f_polynomials(p, form)
        return _exact_value(num, den, t, bits)
    return _interval_value(p, t, depth, bits, form)


def f_eval(p, t, depth=64, bits=DEFAULT_BITS):
    """Certified enclosure of f_{c,d}(t), cross-checked between both forms."""
    if not isinstance(t, (Rational, Algebraic, IntervalBase)):
        t = rational(t)
    a = f_form(p, t, "3.3", depth, bits)
    b = f_form(p, t, "3.4", depth, bits)
    if not a.interval().intersects(b.interval()):
        raise ArithmeticError(f"f forms disagree at {t}: {a} vs {b}")
    return CertifiedValue(max(a.lower, b.lower), min(a.upper, b.upper),
                          max(a.depth_used, b.depth_used))


# --------------------------------------------------------------------------
# case split on [q_f(m), m+1]


def _threshold(digits, m):
    return PeriodicStream(tuple(digits), (0,), 2 * m)


def classify_clauses(m):
    """Threshold clauses as (name, first digit or None, threshold digits, case above, case below).

    A clause applies to c+d with the given first digit (any when None); the
    stream is compared with threshold 0^inf.
    """
    k = m // 2
    if m % 2:
        if k == 0:
            return [("odd k=0", None, (0, 0, 1, 2))]
        if k == 1:
            return [("odd k=1 lead 0", 0, (0, 4, 5)), ("odd k=1 lead 1", 1, (1, 2)),
                    ("odd k=1 lead >=2", None, (1, 2))]
        return [("odd k>=2 lead k-1", k - 1, (k - 1, m + 2)), ("odd k>=2 lead k", k, (k, k + 1)),
                ("odd k>=2 other", None, (k, k + 1))]
    if k == 1:
        return [("m=2", None, (0, 2, 1))]
    return [("even lead k-1", k - 1, (k - 1, m - 1, k + 1)),
            ("even lead k-2", k - 2, (k - 2, 2 * m - 1, k + 1)),
            ("even other", None, (k,))]


def case_classify(c_plus_d, m, with_clause=False):
    """Which conclusion the threshold lemmas give for c+d on [q_f(m), m+1]."""
    if c_plus_d.alphabet_max != 2 * m:
        raise ValueError("c+d must be a stream over {0..2m}")
    lead = c_plus_d.digit_at(1)
    k = m // 2
    clause = _pick_clause(lead, m, k)
    name, _, digits = clause
    order = lex_compare(c_plus_d, _threshold(digits, m), 64)
    # equality with threshold 0^inf to the working depth still means >=
    case = Case.MONOTONE if order is Order.LT else Case.POSITIVE
    return (case, name) if with_clause else case


def _pick_clause(lead, m, k):
    clauses = {c[0]: c for c in classify_clauses(m)}
    if m % 2:
        if k == 0:
            return clauses["odd k=0"]
        if k == 1:
            if lead == 0:
                return clauses["odd k=1 lead 0"]
            if lead == 1:
                return clauses["odd k=1 lead 1"]
            return clauses["odd k=1 lead >=2"]
        if lead == k - 1:
            return clauses["odd k>=2 lead k-1"]
        if lead == k:
            return clauses["odd k>=2 lead k"]
        return clauses["odd k>=2 other"] if lead > k else clauses["odd k>=2 lead k-1"]
    if k == 1:
        return clauses["m=2"]
    if lead == k - 1:
        return clauses["even lead k-1"]
    if lead <= k - 2:
        return clauses["even lead k-2"]
    return clauses["even other"]


# --------------------------------------------------------------------------
# roots and certificates


def _require_a_prime(s, q, m, depth, label):
    verdict = a_prime_verdict(s, q, m, depth)
    if verdict is False:
        raise NotInAPrime(f"{label} = {s} is not in A'_q at q = {q}")
    if verdict is None:
        raise UndecidedAtDepth(f"A' membership of {label} at {q} is unresolved at depth {depth}")


def _lower_point(q):
    return q.interval(256).lo


def _upper_point(q):
    return q.interval(256).hi


def solve_q_cd(p, q_start, tol=Fraction(1, 2 ** 64), depth=A_PRIME_DEPTH,
               require_start_membership=True, construction="Manual"):
    """The unique zero of f_{c,d} in [q_start, m+1], certified."""
    m = p.m
    qf = q_f(m)
    if _upper_point(q_start) < _lower_point(qf) or _lower_point(q_start) > m + 1:
        raise SignContractViolated(f"q_start {q_start} outside [q_f({m}), {m + 1}]")
    f0 = f_eval(p, q_start, depth)
    if f0.lower > 0:
        raise SignContractViolated(f"f({q_start}) = {f0} > 0; the pair is not in B'_q")
    if f0.upper > 0:
        raise UndecidedAtDepth(f"sign of f({q_start}) unresolved: {f0}")
    if require_start_membership:
        _require_a_prime(p.c, q_start, m, depth, "c")
        _require_a_prime(p.d, q_start, m, depth, "d")
    if f0.lower == f0.upper == 0:
        root = q_start
    elif q_start.exact and p.is_periodic:
        num, _ = f_polynomials(p, "3.3")
        top = f_eval(p, rational(m + 1), depth)
        if top.lower == top.upper == 0:
            root = rational(m + 1)
        else:
            lo = _upper_point(q_start)
            if f_eval(p, rational(lo), depth).lower >= 0:
                lo = _lower_point(q_start)
            root = root_in(num, lo, m + 1, tol)
    else:
        root = monotone_bisect(lambda t: f_eval(p, t, depth), q_start, rational(m + 1), tol)
    _require_a_prime(p.c, root, m, depth, "c")
    _require_a_prime(p.d, root, m, depth, "d")
    residual = _residual(p, root, depth)
    return B2Certificate(p, root, residual, depth, construction)


def _residual(p, q, depth):
    if isinstance(q, IntervalBase):
        lo = f_eval(p, rational(q.lo), depth)
        hi = f_eval(p, rational(q.hi), depth)
        return CertifiedValue(min(lo.lower, hi.lower), max(lo.upper, hi.upper), hi.depth_used)
    return f_eval(p, q, depth)


def is_golden(q, m):
    g = G(m)
    if isinstance(q, Rational) and isinstance(g, Rational):
        return q.value == g.value
    if isinstance(q, Algebraic) and isinstance(g, Algebraic):
        return q == g
    return False


def certify_b2_membership(q, p, tol=RESIDUAL_TOL, depth=A_PRIME_DEPTH, construction="Manual",
                          exclude_golden=True):
    """Certificate that q carries a point with exactly two expansions, via the pair p."""
    m = p.m
    q.check_range(m)
    if exclude_golden and is_golden(q, m):
        raise GoldenRatioExcluded(f"q = G({m}) never carries a two-expansion point")
    _require_a_prime(p.c, q, m, depth, "c")
    _require_a_prime(p.d, q, m, depth, "d")
    residual = _residual(p, q, depth)
    if not residual.contains_zero() or residual.width >= tol:
        raise ResidualTooLarge(f"residual {residual} does not certify a zero (tol {tol})")
    return B2Certificate(p, q, residual, depth, construction)


def pair_order_check(q_start, pairs, tol=Fraction(1, 2 ** 64), depth=A_PRIME_DEPTH):
    """Solve every pair and check that a larger c (or d) gives a smaller root."""
    certs = [solve_q_cd(p, q_start, tol, depth) for p in pairs]
    checks = []
    for i, (pi, ci) in enumerate(zip(pairs, certs)):
        for j, (pj, cj) in enumerate(zip(pairs, certs)):
            if i == j:
                continue
            same_d = pi.d == pj.d and lex_compare(pi.c, pj.c, depth) is Order.LT
            same_c = pi.c == pj.c and lex_compare(pi.d, pj.d, depth) is Order.LT
            if not (same_d or same_c):
                continue
            # pj has the larger stream, so its root must be smaller
            ok = root_less(cj.q, ci.q)
            checks.append({"smaller": i, "larger": j, "varied": "c" if same_d else "d", "ok": ok})
    return {"roots": certs, "checks": checks, "ok": all(c["ok"] for c in checks)}


def root_less(a, b, bits=64):
    """Certified a < b for two bases; refines until the enclosures separate."""
    while bits <= 1024:
        ia, ib = a.interval(bits), b.interval(bits)
        if ia.hi < ib.lo:
            return True
        if ib.hi < ia.lo:
            return False
        if not (a.exact and b.exact):
            break
        bits *= 2
    raise UndecidedAtDepth(f"cannot separate {a} and {b}")


# --------------------------------------------------------------------------
# constructions


def construct_ubar_pair(a, alpha_p, m):
    """c = reflect(a^+) alpha(p), d = 0^n reflect(alpha(p)) for alpha(q) = (a)^inf."""
    n = len(a)
    if alpha_p.prefix(n).digits != a.digits:
        raise PrefixMismatch(f"alpha(p) does not start with {a}")
    head = bump_last(a, "+").reflect()
    c = alpha_p.prepend(head)
    d = alpha_p.reflect().prepend(DigitWord((0,) * n, m))
    return PairFunction(c, d, m)


def v_pattern(a):
    """alpha(q) = (a^+ reflect(a^+))^inf."""
    ap = bump_last(a, "+")
    return PeriodicStream((), ap.digits + ap.reflect().digits, a.alphabet_max)


def _check_v_word(a):
    s = a.periodic()
    if not is_alpha_admissible(s) or classify_V_admissible(s) is VClass.NONE:
        raise NotAdmissible(f"({a})^inf does not satisfy the V condition")
    if not is_alpha_admissible(v_pattern(a)):
        raise NotAdmissible(f"{v_pattern(a)} is not the alpha of any base")


def construct_V_pair(a, m, check=True):
    """c = reflect(a^+) a^inf, d = 0^2n reflect(a)^inf."""
    if check:
        _check_v_word(a)
    n = len(a)
    head = bump_last(a, "+").reflect()
    c = PeriodicStream(head.digits, a.digits, m)
    d = PeriodicStream((0,) * (2 * n), a.reflect().digits, m)
    return PairFunction(c, d, m)


def v_base(a, m):
    return base_of_alpha(v_pattern(a), m)


def construct_accumulation_family(a, m, j, ell, check=True):
    """(c_ell, d_j); ``None`` for ell or j selects the limit streams c or d."""
    if check:
        _check_v_word(a)
    n = len(a)
    ap = bump_last(a, "+")
    head = ap.reflect()
    tail = head.digits + ap.digits
    if ell is None:
        c = PeriodicStream(head.digits, a.digits, m)
    else:
        c = PeriodicStream(head.digits + a.digits * ell, tail, m)
    if j is None:
        d = PeriodicStream((0,) * (2 * n), a.reflect().digits, m)
    else:
        d = PeriodicStream((0,) * (2 * n) + a.reflect().digits * j, tail, m)
    return PairFunction(c, d, m)


def certify_V(a, m, tol=RESIDUAL_TOL, depth=A_PRIME_DEPTH):
    q = v_base(a, m)
    return certify_b2_membership(q, construct_V_pair(a, m), tol, depth, construction="Lemma4_3")


# --------------------------------------------------------------------------
# bounded search


def a_prime_streams(q, m, max_size, depth=A_PRIME_DEPTH):
    """Eventually periodic streams in A'_q with preperiod + period <= max_size."""
    seen = set()
    out = []
    for size in range(1, max_size + 1):
        for per_len in range(1, size + 1):
            pre_len = size - per_len
            for digits in _words(m, size):
                s = PeriodicStream(digits[:pre_len], digits[pre_len:], m)
                if s in seen:
                    continue
                seen.add(s)
                if a_prime_verdict(s, q, m, depth) is True:
                    out.append(s)
    return out


def _words(m, n):
    if n == 0:
        yield ()
        return
    for w in _words(m, n - 1):
        for d in range(m + 1):
            yield w + (d,)


def search_b2_pair(q, m, max_size=4, depth=A_PRIME_DEPTH):
    """A pair (c, d) of small A'_q streams with f_{c,d}(q) = 0 exactly, or None.

    f vanishes iff (c)_q + (d)_q = m q/(q-1) - (m+1), so each stream value is
    looked up against the target minus the other.  Needs an exact base.
    """
    if not q.exact:
        raise TypeError("pair search needs an exact base")
    q.check_range(m)
    f = q.field()
    qe = f.element((0, 1))
    one = f.const(1)
    target = f.sub(f.div(f.mul(f.const(m), qe), f.sub(qe, one)), f.const(m + 1))
    values = {}
    streams = a_prime_streams(q, m, max_size, depth)
    for s in streams:
        _, num, den = field_value(s, q)
        values.setdefault(f.div(num, den), s)
    for s in streams:
        _, num, den = field_value(s, q)
        other = values.get(f.sub(target, f.div(num, den)))
        if other is not None:
            return PairFunction(s, other, m)
    return None
