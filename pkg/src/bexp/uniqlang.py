"""Unique-expansion languages at component right endpoints and on ladder slices.

Members (other than 0^inf, m^inf) are sequences of the form

    omega (c0^-)^j (c_i1 ~c_i1)^j1 (c_i1 ~c_i2)^l1 (c_i2 ~c_i2)^j2 ...

or their reflections, with ~ the reflection.  The form alone is looser than
the language: a word can parse and still break the block successor rule
(after c_l preceded by a digit below m comes ~c_l or ~c_l^+) or, on a slice,
contain a forbidden block w c_l.  ``recognize`` therefore accepts a word when
it parses *and* passes those two checks.

Finite words are treated as prefixes: Accept means "extends to a member".
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

from bexp.errors import ContractViolation, LengthGuard
from bexp.expansions import alpha_stream, unique_verdict
from bexp.numeric import rational
from bexp.spectra import component_from_generator, first_generator
from bexp.words import (Block, DecompositionForm, DigitWord, Order, PeriodicStream, VClass,
                        c_block, c_limit_stream, classify_V_admissible, is_alpha_admissible,
                        is_matched, lex_compare, parse_word)

MAX_LENGTH = 24


@dataclass(frozen=True)
class RightEndpoint:
    def __str__(self):
        return "RightEndpoint"


@dataclass(frozen=True)
class Slice:
    ell: int

    def __post_init__(self):
        if self.ell < 1:
            raise ValueError("slice index must be >= 1")

    def __str__(self):
        return f"Slice({self.ell})"


@dataclass(frozen=True)
class LanguageSpec:
    m: int
    c0_minus: DigitWord
    slice: object = RightEndpoint()
    omega_bound: int = 0  # extra length for matched-omega search (general components)

    def __post_init__(self):
        if self.c0_minus.alphabet_max != self.m:
            raise ValueError("generator alphabet differs from m")
        if self.first_component and self.m == 1:
            raise ContractViolation("the m=1 first-component language is not covered "
                                    "by the odd-m form; it needs m = 2k+1 >= 3")

    @property
    def k(self):
        return self.m // 2

    @property
    def n(self):
        return len(self.c0_minus)

    @property
    def first_component(self):
        return self.c0_minus == first_generator(self.m)

    @property
    def parity_case(self):
        if not self.first_component:
            return None
        return f"{'odd' if self.m % 2 else 'even'}({self.k})"

    @property
    def max_index(self):
        return self.slice.ell - 1 if isinstance(self.slice, Slice) else None

    def block(self, i):
        return c_block(self.c0_minus, i).digits

    def __str__(self):
        return f"m={self.m} c0-={self.c0_minus} {self.slice}"


@dataclass(frozen=True)
class Accept:
    decomposition: DecompositionForm

    def __bool__(self):
        return True


@dataclass(frozen=True)
class Reject:
    reason: str

    def __bool__(self):
        return False


# --------------------------------------------------------------------------
# grammar
#
# States: ("omega",), ("c0", count), ("c0inf",), ("blocks", cur).
# A move is (chunk, next_state, label); chunk () marks an empty move.


def _reflect(digits, m):
    return tuple(m - d for d in digits)


def _index_cap(spec, rem):
    """Block indices beyond this give the same truncations (c_i prefixes c_(i+1))."""
    i = 0
    while (1 << i) * spec.n < rem:
        i += 1
    cap = i
    if spec.max_index is not None:
        cap = min(cap, spec.max_index)
    return cap


def _first_omegas(spec, rem):
    m, k = spec.m, spec.k
    low_b = k if m % 2 else k - 1
    out = [((d,), ("omega_digit", d)) for d in range(1, m)]
    for lead, bs in ((0, range(1, k + 2)), (m, range(max(low_b, 0), m))):
        for big_n in range(1, rem + 1):
            for b in bs:
                out.append(((lead,) * big_n + (b,), ("omega", lead, big_n, b)))
        out.append(((lead,) * rem, ("omega_open", lead)))
    return out


def matched_words(a, max_len):
    """All words of length <= max_len matched to ``a``, by breadth-first search."""
    return _matched_words(a.digits, a.alphabet_max, max_len)


@lru_cache(maxsize=64)
def _matched_words(a, m, max_len):
    n = len(a)
    upper, lower = a, _reflect(a, m)
    found = []
    frontier = [()]
    for _ in range(max_len):
        nxt = []
        for u in frontier:
            for d in range(m + 1):
                v = u + (d,)
                # windows lying inside v are final; prune on them
                ell = len(v) - n
                if ell >= 1:
                    win, head = v[ell:], v[:ell]
                    if any(x != m for x in head) and win > upper:
                        continue
                    if any(x != 0 for x in head) and win < lower:
                        continue
                nxt.append(v)
                if is_matched(DigitWord(v, m), DigitWord(a, m)):
                    found.append(v)
        frontier = nxt
    return tuple(found)


def _omega_moves(spec, rem):
    if spec.first_component:
        return _first_omegas(spec, rem)
    bound = rem + spec.n + spec.omega_bound
    seen = set()
    out = []
    for u in matched_words(spec.c0_minus, bound):
        chunk = u if len(u) <= rem else u[:rem]
        if chunk not in seen:
            seen.add(chunk)
            out.append((chunk, ("omega_matched", u)))
    return out


def _moves(spec, state, rem):
    kind = state[0]
    c0m = spec.c0_minus.digits
    if kind == "omega":
        return [(chunk, ("c0", 0), label) for chunk, label in _omega_moves(spec, rem)]
    if kind == "c0":
        count = state[1]
        moves = []
        if spec.first_component:
            if spec.m % 2:
                if count < 2:
                    moves.append((c0m, ("c0", count + 1), ("c0",)))
                if count >= 1:
                    moves.append(((), ("blocks", 0), ("end_c0", count)))
            else:
                moves.append((c0m, ("c0", 0), ("c0",)))
                moves.append(((), ("blocks", 0), ("end_c0",)))
        else:
            moves.append(((), ("blocks", 0), ("end_c0", 0)))
            moves.append(((), ("c0inf",), ("c0inf",)))
        return moves
    if kind == "c0inf":
        return [(c0m, ("c0inf",), ("c0",))]
    cur = state[1]
    cap = max(_index_cap(spec, rem), cur)
    moves = []
    for i in range(cur, cap + 1):
        ci = spec.block(i)
        moves.append((ci + _reflect(ci, spec.m), ("blocks", i), ("P", i)))
        if len(ci) >= rem:
            continue
        top = max(_index_cap(spec, rem - len(ci)), i + 1)
        for i2 in range(i + 1, top + 1):
            if spec.max_index is not None and i2 > spec.max_index:
                break
            moves.append((ci + _reflect(spec.block(i2), spec.m), ("blocks", i2), ("X", i, i2)))
    return moves


def _form_prefixes(spec, length):
    """Length-``length`` prefixes of (unreflected) form sequences."""
    memo = {}

    def go(state, rem):
        key = (state, rem)
        if key in memo:
            return memo[key]
        if rem == 0:
            memo[key] = {()}
            return memo[key]
        memo[key] = set()  # guards empty-move cycles
        out = set()
        for chunk, nxt, _ in _moves(spec, state, rem):
            if not chunk:
                out |= go(nxt, rem)
            elif len(chunk) >= rem:
                out.add(chunk[:rem])
            else:
                out |= {chunk + t for t in go(nxt, rem - len(chunk))}
        memo[key] = out
        return out

    return go(("omega",), length)


def _parse(spec, target):
    """First derivation of ``target`` as a prefix, as a list of labels, or None."""
    n_total = len(target)

    def go(state, pos, seen_empty):
        if pos == n_total:
            return []
        for chunk, nxt, label in _moves(spec, state, n_total - pos):
            if not chunk:
                if nxt in seen_empty:
                    continue
                rest = go(nxt, pos, seen_empty | {state})
                if rest is not None:
                    return [label] + rest
                continue
            take = min(len(chunk), n_total - pos)
            if target[pos:pos + take] != chunk[:take]:
                continue
            if take < len(chunk):
                return [label + ("open",)]
            rest = go(nxt, pos + take, frozenset())
            if rest is not None:
                return [label] + rest
        return None

    return go(("omega",), 0, frozenset())


def _decomposition(spec, labels, reflected, target):
    omega = ()
    j = 0
    blocks = []  # [index, repeat, link]
    unresolved = bool(labels) and labels[-1][-1] == "open"
    for lab in labels:
        tag = lab[0]
        if tag.startswith("omega"):
            if tag == "omega_digit":
                omega = (lab[1],)
            elif tag == "omega":
                omega = (lab[1],) * lab[2] + (lab[3],)
            elif tag == "omega_matched":
                omega = lab[1]
            else:
                omega = target[:]
        elif tag == "c0":
            j += 1
        elif tag == "c0inf":
            j = math.inf
        elif tag == "P":
            if blocks and blocks[-1][0] == lab[1] and blocks[-1][2] == 0:
                blocks[-1][1] += 1
            else:
                blocks.append([lab[1], 1, 0])
        elif tag == "X":
            if not (blocks and blocks[-1][0] == lab[1] and blocks[-1][2] == 0):
                blocks.append([lab[1], 0, 0])
            blocks[-1][2] = 1
            blocks.append([lab[2], 0, 0])
    if unresolved and j and labels[-1][0] == "c0" and not spec.first_component:
        j = math.inf
    # a trailing index reached only through a link has repeat 0; merge duplicates
    merged = []
    for b in blocks:
        if merged and merged[-1][0] == b[0]:
            merged[-1][1] += b[1]
            merged[-1][2] = b[2]
        else:
            merged.append(b)
    return DecompositionForm(DigitWord(tuple(omega), spec.m), j,
                             tuple(Block(i, r, l) for i, r, l in merged), reflected, unresolved)


# --------------------------------------------------------------------------
# block discipline


def discipline_violation(digits, spec):
    """First breach of the successor rule or the slice forbidden blocks, else None."""
    m = spec.m
    n_total = len(digits)
    level = 0
    while (1 << level) * spec.n <= n_total - 1:
        c = spec.block(level)
        cb = _reflect(c, m)
        size = len(c)
        succ_hi = (cb, cb[:-1] + (cb[-1] + 1,))       # after c: ~c or ~c^+
        succ_lo = (c, c[:-1] + (c[-1] - 1,))           # after ~c: c or c^-
        for s in range(1, n_total - size + 1):
            piece = digits[s:s + size]
            after = digits[s + size:s + 2 * size]
            if digits[s - 1] < m and piece == c:
                if not any(after == w[:len(after)] for w in succ_hi):
                    return f"c_{level} at {s + 1} not followed by its reflection"
                if spec.max_index is not None and level == spec.max_index + 1:
                    return f"forbidden block w c_{level} at {s}"
            if digits[s - 1] > 0 and piece == cb:
                if not any(after == w[:len(after)] for w in succ_lo):
                    return f"reflected c_{level} at {s + 1} not followed by c_{level}"
                if spec.max_index is not None and level == spec.max_index + 1:
                    return f"forbidden reflected block at {s}"
        level += 1
    return None


# --------------------------------------------------------------------------
# public operations


def _as_digits(b, spec):
    if isinstance(b, DigitWord):
        if b.alphabet_max != spec.m:
            raise ValueError("word alphabet differs from m")
        return b.digits
    if isinstance(b, str):
        return parse_word(b, spec.m).digits
    return tuple(b)


def recognize(b, spec):
    """Accept(decomposition) when ``b`` is a prefix of a language member, else Reject."""
    digits = _as_digits(b, spec)
    if not digits:
        return Accept(DecompositionForm(DigitWord((), spec.m), 0, (), False, True))
    parse = None
    for reflected, target in ((False, digits), (True, _reflect(digits, spec.m))):
        labels = _parse(spec, target)
        if labels is not None:
            parse = _decomposition(spec, labels, reflected, target)
            break
    if parse is None:
        return Reject("no parse of the form (omega, c0 power, blocks) or its reflection")
    why = discipline_violation(digits, spec)
    if why is not None:
        return Reject(why)
    return Accept(parse)


def enumerate_words(spec, length):
    """All length-``length`` prefixes of members, sorted lexicographically."""
    if length > MAX_LENGTH:
        raise LengthGuard(f"length {length} exceeds {MAX_LENGTH}")
    if length < 0:
        raise ValueError("length must be >= 0")
    raw = _form_prefixes(spec, length)
    words = raw | {_reflect(w, spec.m) for w in raw}
    keep = sorted(w for w in words if discipline_violation(w, spec) is None)
    return [DigitWord(w, spec.m) for w in keep]


# the spec names this operation ``enumerate``
enumerate = enumerate_words  # noqa: A001


# --------------------------------------------------------------------------
# cross-validation oracle


def _tails(spec, levels=3):
    """Periodic tails for oracle extensions: (c0^-)^inf, (c_i ~c_i)^inf for i <= levels,
    their reflections, 0^inf and m^inf.  Independent of the slice under test."""
    m = spec.m
    tails = [spec.c0_minus.digits]
    for i in range(levels + 1):
        ci = spec.block(i)
        tails.append(ci + _reflect(ci, m))
    tails += [_reflect(t, m) for t in tails]
    return tails + [(0,), (m,)]


def _prefix_ok(digits, alpha_prefix, m):
    """No shift window inside ``digits`` already breaks the uniqueness inequalities."""
    n_total = len(digits)
    for s in range(1, n_total):
        head = digits[:s]
        tail = digits[s:]
        ref = alpha_prefix[:len(tail)]
        if any(d != m for d in head) and tail > ref:
            return False
        if any(d != 0 for d in head) and _reflect(tail, m) > ref:
            return False
    return True


def extendable(digits, alpha, spec, extra=None, depth=64):
    """Oracle: some periodic extension of ``digits`` passes the uniqueness test at alpha.

    Candidates are digits + u + (t)^inf with |u| <= extra and t a language tail;
    each candidate is judged by ``unique_verdict``.  A verdict undecided at depth
    counts as a pass only if no candidate is definitely unique.
    """
    m = spec.m
    if extra is None:
        extra = 2 * len(spec.block(2)) + 1
    alpha_prefix = alpha.prefix(len(digits) + extra + 8).digits
    tails = _tails(spec)
    undecided = False
    stack = [tuple(digits)]
    while stack:
        w = stack.pop()
        if not _prefix_ok(w, alpha_prefix, m):
            continue
        for t in tails:
            s = PeriodicStream(w, t, m)
            v = unique_verdict(s, alpha, depth)
            if v is True:
                return True
            if v is None:
                undecided = True
        if len(w) - len(digits) < extra:
            stack.extend(w + (d,) for d in range(m + 1))
    return None if undecided else False


def slice_base(spec, where=0.5):
    """A rational base strictly inside (q_l, q_(l+1)) for a Slice spec."""
    ell = spec.slice.ell
    comp = component_from_generator(spec.c0_minus, spec.m, ladder_len=ell + 1)
    lo = comp.ladder[ell - 1].interval(96).hi
    hi = comp.ladder[ell].interval(96).lo
    x = lo + (hi - lo) * _frac(where)
    return rational(_simplify(x, lo, hi))


def _frac(x):
    from fractions import Fraction

    return Fraction(x).limit_denominator(1 << 20)


def _simplify(x, lo, hi):
    """A short rational in (lo, hi) close to x."""
    from fractions import Fraction

    den = 1
    while True:
        cand = Fraction(round(x * den), den)
        if lo < cand < hi:
            return cand
        den *= 2


def alpha_for(spec, q=None, depth=64):
    """alpha(q) for the cross-check: the base's own expansion, or the c-limit at q0*."""
    if q is None:
        if isinstance(spec.slice, Slice):
            q = slice_base(spec)
        else:
            return None, c_limit_stream(spec.c0_minus)
    return q, alpha_stream(q, spec.m, depth)


@dataclass
class CrossReport:
    spec: str
    q: str
    length: int
    checked: int = 0
    accepted: int = 0
    disagreements: list = field(default_factory=list)
    undecided: list = field(default_factory=list)
    soundness_only: bool = False

    @property
    def ok(self):
        return not self.disagreements

    def to_json(self):
        return {"spec": self.spec, "q": self.q, "length": self.length, "checked": self.checked,
                "accepted": self.accepted, "disagreements": self.disagreements,
                "undecided": self.undecided, "soundness_only": self.soundness_only,
                "ok": self.ok}


def cross_validate(spec, q=None, length=8, depth=64):
    """Compare ``recognize`` with the extension oracle on every word of ``length``.

    For general components the form describes members outside the language at
    q0 only, so just Accept => extendable is checked (``soundness_only``).
    """
    q, alpha = alpha_for(spec, q, depth)
    m = spec.m
    report = CrossReport(str(spec), str(q) if q is not None else "q0*", length,
                         soundness_only=not spec.first_component)
    for w in _all_words(m, length):
        report.checked += 1
        acc = bool(recognize(w, spec))
        report.accepted += acc
        if report.soundness_only and not acc:
            continue
        truth = extendable(w, alpha, spec, depth=depth)
        word_text = "".join(map(str, w)) if m <= 9 else ".".join(map(str, w))
        if truth is None:
            report.undecided.append(word_text)
        elif truth != acc:
            report.disagreements.append({"word": word_text, "recognize": acc, "oracle": truth})
    return report


def _all_words(m, length):
    if length == 0:
        yield ()
        return
    for w in _all_words(m, length - 1):
        for d in range(m + 1):
            yield w + (d,)


def forbidden_block_scan(spec, max_extra=4):
    """Accepted words of length <= |c_l| + max_extra never contain a forbidden block."""
    if not isinstance(spec.slice, Slice):
        return []
    ell = spec.slice.ell
    c = spec.block(ell)
    cb = _reflect(c, spec.m)
    bad = []
    for length in range(len(c) + 1, len(c) + max_extra + 1):
        for w in enumerate_words(spec, length):
            d = w.digits
            for s in range(1, length - len(c) + 1):
                piece = d[s:s + len(c)]
                if (d[s - 1] < spec.m and piece == c) or (d[s - 1] > 0 and piece == cb):
                    bad.append(str(w))
                    break
    return bad


# --------------------------------------------------------------------------
# window inequalities on c_l


def window_violations(c0_minus, level):
    """Positions i where ~(a_1..a_(N-i)) < a_(i+1)..a_N <= a_1..a_(N-i) fails for a = c_level."""
    a = c_block(c0_minus, level).digits
    m = c0_minus.alphabet_max
    big_n = len(a)
    bad = []
    for i in range(big_n):
        tail, head = a[i:], a[:big_n - i]
        if not (_reflect(head, m) < tail <= head):
            bad.append(i)
    return bad


def generator_ok(c0_minus):
    """c0^- generates a component of (M, m+1]: (c0^-)^inf is an admissible smallest-block
    alpha in the closure of U, at or above alpha(M) = k^inf."""
    m = c0_minus.alphabet_max
    if not len(c0_minus) or c0_minus.digits[-1] >= m:
        return False
    s = c0_minus.periodic()
    if s.period != c0_minus.digits:
        return False
    if lex_compare(s, PeriodicStream((), (m // 2,), m), 64) is Order.LT:
        return False
    if not any(c0_minus.digits):
        return True  # m = 1: the trivial generator of (1, q_KL)
    return is_alpha_admissible(s) and classify_V_admissible(s) is not VClass.NONE
