"""Finite digit words, infinite digit streams and lexicographic predicates.

Positions are 1-indexed throughout, matching the usual ``c_1 c_2 ...``
notation for expansions.  Streams come in three flavours:

* ``PeriodicStream``  -- eventually periodic, stored in canonical form so
  that representation equality is stream equality;
* ``GeneratedStream`` -- Thue-Morse derived or the limit of the block
  recursion ``c_{l+1} = c_l reflect(c_l)^+``, evaluable at any index;
* ``KnownPrefix``     -- only a finite prefix is known (e.g. a quasi-greedy
  expansion computed to some depth); comparisons past it are unresolved.
"""
from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass, field
from functools import lru_cache

from bexp.errors import BumpOutOfRange, NotAdmissible, ParseError, UndecidedAtDepth

MAX_ALPHABET = 2 ** 16


class Order(enum.Enum):
    LT = "LT"
    GT = "GT"
    EQ = "EQ"
    EQ_TO_DEPTH = "EQ_to_depth"

    @property
    def resolved(self):
        return self is not Order.EQ_TO_DEPTH


class VClass(enum.Enum):
    U = "U"
    UBAR = "Ubar"
    V = "V"
    NONE = "None"
    UNDECIDED = "UndecidedAtDepth"


def _check_alphabet(m):
    if not isinstance(m, int) or m < 1 or m > MAX_ALPHABET:
        raise ValueError(f"alphabet_max must be an integer in [1, {MAX_ALPHABET}], got {m!r}")


def _check_digits(digits, m):
    for d in digits:
        if not 0 <= d <= m:
            raise ValueError(f"digit {d} outside [0, {m}]")


# --------------------------------------------------------------------------
# finite words


@dataclass(frozen=True)
class DigitWord:
    digits: tuple
    alphabet_max: int

    def __post_init__(self):
        _check_alphabet(self.alphabet_max)
        object.__setattr__(self, "digits", tuple(int(d) for d in self.digits))
        _check_digits(self.digits, self.alphabet_max)

    @classmethod
    def parse(cls, text, m):
        return parse_word(text, m)

    def __len__(self):
        return len(self.digits)

    def __iter__(self):
        return iter(self.digits)

    def __getitem__(self, item):
        if isinstance(item, slice):
            return DigitWord(self.digits[item], self.alphabet_max)
        return self.digits[item]

    def __add__(self, other):
        if isinstance(other, DigitWord):
            _same_alphabet(self, other)
            return DigitWord(self.digits + other.digits, self.alphabet_max)
        if isinstance(other, DigitStream):
            return other.prepend(self)
        return NotImplemented

    def __mul__(self, times):
        return DigitWord(self.digits * times, self.alphabet_max)

    def __lt__(self, other):
        return self.digits < other.digits

    def __le__(self, other):
        return self.digits <= other.digits

    def __str__(self):
        return format_digits(self.digits, self.alphabet_max)

    def reflect(self):
        m = self.alphabet_max
        return DigitWord(tuple(m - d for d in self.digits), m)

    def periodic(self):
        """The stream ``(self)^inf``."""
        return PeriodicStream((), self.digits, self.alphabet_max)

    def then_zeros(self):
        return PeriodicStream(self.digits, (0,), self.alphabet_max)


def word(digits, m):
    if isinstance(digits, str):
        return parse_word(digits, m)
    return DigitWord(tuple(digits), m)


def _same_alphabet(a, b):
    if a.alphabet_max != b.alphabet_max:
        raise ValueError(f"alphabet mismatch: {a.alphabet_max} vs {b.alphabet_max}")


def bump_last(w, direction):
    """Change the last digit of ``w`` by +1 (``"+"``) or -1 (``"-"``)."""
    if not len(w):
        raise BumpOutOfRange("cannot bump the empty word")
    last = w.digits[-1]
    if direction in ("+", 1):
        if last >= w.alphabet_max:
            raise BumpOutOfRange(f"last digit {last} equals m={w.alphabet_max}")
        last += 1
    elif direction in ("-", -1):
        if last <= 0:
            raise BumpOutOfRange("last digit is already 0")
        last -= 1
    else:
        raise ValueError(f"direction must be '+' or '-', got {direction!r}")
    return DigitWord(w.digits[:-1] + (last,), w.alphabet_max)


def reflect(x):
    return x.reflect()


def thue_morse(i):
    """tau_i: parity of the number of 1-bits of i."""
    if i < 0:
        raise ValueError("Thue-Morse index must be non-negative")
    return i.bit_count() & 1


@lru_cache(maxsize=256)
def _c_block_digits(c0_minus, m, level):
    c = list(c0_minus)
    if not c:
        raise ValueError("c0_minus must be nonempty")
    if c[-1] >= m:
        raise BumpOutOfRange(f"c0_minus ends with m={m}; c0 does not exist")
    c[-1] += 1
    for _ in range(level):
        tail = [m - d for d in c]
        tail[-1] += 1
        c = c + tail
    return tuple(c)


def c_block(c0_minus, level):
    """c_level of the Thue-Morse type recursion generated by ``c0_minus``."""
    if level < 0:
        raise ValueError("level must be >= 0")
    return DigitWord(_c_block_digits(c0_minus.digits, c0_minus.alphabet_max, level),
                     c0_minus.alphabet_max)


def compare_words(u, v):
    """Lexicographic comparison of two equal-length digit sequences."""
    for a, b in zip(u, v):
        if a != b:
            return Order.LT if a < b else Order.GT
    return Order.EQ


# --------------------------------------------------------------------------
# infinite streams


class DigitStream:
    """An infinite digit sequence over ``{0, ..., alphabet_max}``."""

    alphabet_max: int
    exact = True  # every digit is known
    kind = "abstract"

    def digit_at(self, i):
        raise NotImplementedError

    @property
    def known_length(self):
        return math.inf

    def prefix(self, n):
        if n > self.known_length:
            raise UndecidedAtDepth(f"only {self.known_length} digits are known")
        return DigitWord(tuple(self.digit_at(i) for i in range(1, n + 1)), self.alphabet_max)

    def digits(self, start, stop):
        """Digits at positions start..stop-1 (1-indexed)."""
        return tuple(self.digit_at(i) for i in range(start, stop))

    def shift(self, n):
        raise NotImplementedError

    def reflect(self):
        raise NotImplementedError

    def prepend(self, w):
        raise NotImplementedError

    def literal(self):
        raise NotImplementedError

    def __str__(self):
        return self.literal()

    @property
    def is_periodic(self):
        return False


@dataclass(frozen=True)
class PeriodicStream(DigitStream):
    preperiod: tuple
    period: tuple
    alphabet_max: int
    kind = "EventuallyPeriodic"

    def __post_init__(self):
        _check_alphabet(self.alphabet_max)
        pre = tuple(int(d) for d in self.preperiod)
        per = tuple(int(d) for d in self.period)
        if not per:
            raise ValueError("period must be nonempty")
        _check_digits(pre + per, self.alphabet_max)
        pre, per = _canonical(pre, per)
        object.__setattr__(self, "preperiod", pre)
        object.__setattr__(self, "period", per)

    @property
    def is_periodic(self):
        return True

    def digit_at(self, i):
        if i < 1:
            raise IndexError("positions start at 1")
        p = len(self.preperiod)
        if i <= p:
            return self.preperiod[i - 1]
        return self.period[(i - p - 1) % len(self.period)]

    def shift(self, n):
        if n < 0:
            raise ValueError("shift must be >= 0")
        p = len(self.preperiod)
        if n <= p:
            return PeriodicStream(self.preperiod[n:], self.period, self.alphabet_max)
        r = (n - p) % len(self.period)
        return PeriodicStream((), self.period[r:] + self.period[:r], self.alphabet_max)

    def reflect(self):
        m = self.alphabet_max
        return PeriodicStream(tuple(m - d for d in self.preperiod),
                              tuple(m - d for d in self.period), m)

    def prepend(self, w):
        _same_alphabet(self, w)
        return PeriodicStream(tuple(w.digits) + self.preperiod, self.period, self.alphabet_max)

    @property
    def is_infinite(self):
        """No last nonzero digit."""
        return any(self.period)

    @property
    def cycle_bound(self):
        """Shifts beyond this index repeat earlier ones."""
        return len(self.preperiod) + 2 * len(self.period)

    def literal(self):
        m = self.alphabet_max
        pre = format_digits(self.preperiod, m)
        if m > 9 and pre:
            pre += "."
        return f"{pre}({format_digits(self.period, m)})^inf"


def _canonical(pre, per):
    n = len(per)
    for d in range(1, n + 1):
        if n % d == 0 and per[:d] * (n // d) == per:
            per = per[:d]
            break
    while pre and pre[-1] == per[-1]:
        pre = pre[:-1]
        per = per[-1:] + per[:-1]
    return pre, per


@dataclass(frozen=True)
class GeneratedStream(DigitStream):
    """Thue-Morse derived (``source='tm'``) or block-recursion limit (``'clim'``)."""

    alphabet_max: int
    source: str
    c0_minus: tuple = ()
    prefix_digits: tuple = ()
    offset: int = 0
    reflected: bool = False

    def __post_init__(self):
        _check_alphabet(self.alphabet_max)
        if self.source not in ("tm", "clim"):
            raise ValueError(f"unknown generator {self.source!r}")
        object.__setattr__(self, "prefix_digits", tuple(int(d) for d in self.prefix_digits))
        object.__setattr__(self, "c0_minus", tuple(int(d) for d in self.c0_minus))
        _check_digits(self.prefix_digits, self.alphabet_max)
        if self.source == "clim":
            if not self.c0_minus:
                raise ValueError("clim stream needs a nonempty c0_minus")
            _c_block_digits(self.c0_minus, self.alphabet_max, 0)

    @property
    def kind(self):
        return "ThueMorseDerived" if self.source == "tm" else "CLimit"

    @property
    def parity_case(self):
        return "odd" if self.alphabet_max % 2 else "even"

    @property
    def k(self):
        return self.alphabet_max // 2 if self.alphabet_max % 2 == 0 else (self.alphabet_max - 1) // 2

    def _base_digit(self, j):
        m = self.alphabet_max
        if self.source == "tm":
            if m % 2:
                d = self.k + thue_morse(j)
            else:
                d = self.k + thue_morse(j) - thue_morse(j - 1)
        else:
            d = _clim_digit(self.c0_minus, m, j)
        return m - d if self.reflected else d

    def digit_at(self, i):
        if i < 1:
            raise IndexError("positions start at 1")
        p = len(self.prefix_digits)
        if i <= p:
            return self.prefix_digits[i - 1]
        return self._base_digit(i - p + self.offset)

    def shift(self, n):
        p = len(self.prefix_digits)
        if n <= p:
            return _replace(self, prefix_digits=self.prefix_digits[n:])
        return _replace(self, prefix_digits=(), offset=self.offset + n - p)

    def reflect(self):
        m = self.alphabet_max
        return _replace(self, prefix_digits=tuple(m - d for d in self.prefix_digits),
                        reflected=not self.reflected)

    def prepend(self, w):
        _same_alphabet(self, w)
        return _replace(self, prefix_digits=tuple(w.digits) + self.prefix_digits)

    def literal(self):
        m = self.alphabet_max
        body = "~" if self.reflected else ""
        body += self.source
        if self.source == "clim":
            body += ":" + format_digits(self.c0_minus, m)
        if self.offset:
            body += f"+{self.offset}"
        pre = format_digits(self.prefix_digits, m)
        if m > 9 and pre:
            pre += "."
        return f"{pre}{{{body}}}"


def _replace(stream, **changes):
    values = dict(alphabet_max=stream.alphabet_max, source=stream.source,
                  c0_minus=stream.c0_minus, prefix_digits=stream.prefix_digits,
                  offset=stream.offset, reflected=stream.reflected)
    values.update(changes)
    return GeneratedStream(**values)


def _clim_digit(c0_minus, m, j):
    n = len(c0_minus)
    half = n
    while half < j:
        half *= 2
    # digit = a + s * x, where x is the digit at position j of a shorter block
    a, s = 0, 1
    while half > n:
        half //= 2
        if j > half:
            j -= half
            bump = 1 if j == half else 0
            a, s = a + s * (m + bump), -s
    c0 = list(c0_minus)
    c0[-1] += 1
    return a + s * c0[j - 1]


def thue_morse_stream(m):
    """The quasi-greedy expansion of 1 at the Komornik-Loreti constant."""
    return GeneratedStream(alphabet_max=m, source="tm")


def c_limit_stream(c0_minus):
    return GeneratedStream(alphabet_max=c0_minus.alphabet_max, source="clim",
                           c0_minus=c0_minus.digits)


@dataclass(frozen=True)
class KnownPrefix(DigitStream):
    """A stream of which only the first ``len(known)`` digits are known."""

    known: tuple
    alphabet_max: int
    exact = False
    kind = "KnownPrefix"

    @property
    def known_length(self):
        return len(self.known)

    def digit_at(self, i):
        if i > len(self.known):
            raise UndecidedAtDepth(f"digit {i} is beyond the {len(self.known)} known digits")
        return self.known[i - 1]

    def shift(self, n):
        return KnownPrefix(self.known[n:], self.alphabet_max)

    def reflect(self):
        return KnownPrefix(tuple(self.alphabet_max - d for d in self.known), self.alphabet_max)

    def prepend(self, w):
        return KnownPrefix(tuple(w.digits) + self.known, self.alphabet_max)

    def literal(self):
        return format_digits(self.known, self.alphabet_max) + "..."


@dataclass(frozen=True)
class SumStream(DigitStream):
    """Digitwise sum of two streams; alphabet is the sum of both alphabets."""

    left: DigitStream
    right: DigitStream
    alphabet_max: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "alphabet_max", self.left.alphabet_max + self.right.alphabet_max)

    @property
    def known_length(self):
        return min(self.left.known_length, self.right.known_length)

    @property
    def exact(self):
        return self.left.exact and self.right.exact

    def digit_at(self, i):
        return self.left.digit_at(i) + self.right.digit_at(i)

    def shift(self, n):
        return SumStream(self.left.shift(n), self.right.shift(n))

    def reflect(self):
        return SumStream(self.left.reflect(), self.right.reflect())

    def prepend(self, w):
        raise TypeError("cannot prepend to a sum stream")

    def literal(self):
        return f"({self.left.literal()} + {self.right.literal()})"


def digit_sum(c, d):
    """The stream c + d (digitwise).  Periodic whenever it provably is."""
    if isinstance(c, PeriodicStream) and isinstance(d, PeriodicStream):
        p = max(len(c.preperiod), len(d.preperiod))
        per = math.lcm(len(c.period), len(d.period))
        digits = [c.digit_at(i) + d.digit_at(i) for i in range(1, p + per + 1)]
        return PeriodicStream(digits[:p], digits[p:], c.alphabet_max + d.alphabet_max)
    if isinstance(c, GeneratedStream) and isinstance(d, GeneratedStream):
        # a generator plus its own reflection, aligned, sums to m^inf
        if (c.source, c.c0_minus, c.offset) == (d.source, d.c0_minus, d.offset) \
                and c.reflected != d.reflected and len(c.prefix_digits) == len(d.prefix_digits) \
                and c.alphabet_max == d.alphabet_max:
            pre = tuple(a + b for a, b in zip(c.prefix_digits, d.prefix_digits))
            return PeriodicStream(pre, (c.alphabet_max,), 2 * c.alphabet_max)
    if isinstance(c, (PeriodicStream, GeneratedStream)) and isinstance(d, (PeriodicStream, GeneratedStream)):
        return SumStream(c, d)
    return SumStream(c, d)


def stream_from_word(w):
    return KnownPrefix(tuple(w.digits), w.alphabet_max)


# --------------------------------------------------------------------------
# comparison and admissibility


def lex_compare(s, t, depth):
    """Compare two streams lexicographically.

    Two eventually periodic streams are compared exactly (``EQ`` means the
    streams are identical).  Otherwise the first ``depth`` digits decide and
    agreement on all of them yields ``EQ_TO_DEPTH``.
    """
    if s.alphabet_max != t.alphabet_max:
        raise ValueError("streams over different alphabets")
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if isinstance(s, PeriodicStream) and isinstance(t, PeriodicStream):
        if s == t:
            return Order.EQ
        bound = max(len(s.preperiod), len(t.preperiod)) + math.lcm(len(s.period), len(t.period))
        for i in range(1, bound + 1):
            a, b = s.digit_at(i), t.digit_at(i)
            if a != b:
                return Order.LT if a < b else Order.GT
        return Order.EQ
    limit = min(depth, s.known_length, t.known_length)
    for i in range(1, int(limit) + 1):
        a, b = s.digit_at(i), t.digit_at(i)
        if a != b:
            return Order.LT if a < b else Order.GT
    return Order.EQ_TO_DEPTH


def _shift_range(s, depth):
    if isinstance(s, PeriodicStream):
        return range(1, s.cycle_bound + 1)
    return range(1, depth + 1)


def _window(s, n, depth):
    # compare windows long enough that a shift by n cannot hide a difference
    return depth if isinstance(s, PeriodicStream) else depth + n


def is_alpha_admissible(s, depth=64):
    """Every shift of ``s`` is <= ``s`` and ``s`` has no last nonzero digit."""
    if isinstance(s, PeriodicStream) and not s.is_infinite:
        return False
    for n in _shift_range(s, depth):
        if lex_compare(s.shift(n), s, _window(s, n, depth)) is Order.GT:
            return False
    return True


def is_beta_admissible(s, depth=64):
    """Every proper shift of ``s`` is strictly below ``s``."""
    undecided = False
    for n in _shift_range(s, depth):
        order = lex_compare(s.shift(n), s, _window(s, n, depth))
        if order in (Order.GT, Order.EQ):
            return False
        if order is Order.EQ_TO_DEPTH:
            undecided = True
    if undecided:
        raise UndecidedAtDepth("a shift agrees with the stream to the working depth")
    return True


def classify_V_admissible(s, depth=64):
    """Strongest of U / Ubar / V satisfied by an alpha-admissible stream."""
    if not is_alpha_admissible(s, depth):
        raise NotAdmissible(f"{s} is not alpha-admissible")
    r = s.reflect()
    strict_low = strict_high = True
    for n in _shift_range(s, depth):
        t = s.shift(n)
        w = _window(s, n, depth)
        hi = lex_compare(t, s, w)
        lo = lex_compare(t, r, w)
        if hi is Order.GT or lo is Order.LT:
            return VClass.NONE
        if hi is not Order.LT:
            strict_high = False
        if lo is not Order.GT:
            strict_low = False
    if strict_low and strict_high:
        return VClass.U
    if strict_low:
        return VClass.UBAR
    return VClass.V


def is_matched(u, a):
    """Whether the word ``u`` is matched to the generator ``a``."""
    _same_alphabet(u, a)
    if not len(a):
        raise ValueError("a must be nonempty")
    m = u.alphabet_max
    p, n = len(u), len(a)
    if p == 0 or u.digits[-1] >= m:
        return False
    ua = u.digits + a.digits
    upper = a.digits
    lower = tuple(m - d for d in a.digits)
    for ell in range(1, p + 1):
        window = ua[ell:ell + n]
        head = u.digits[:ell]
        if any(d != m for d in head) and window > upper:
            return False
        if any(d != 0 for d in head) and window < lower:
            return False
    return True


@dataclass(frozen=True)
class Block:
    index: int
    repeat: object  # int or math.inf
    link: int


@dataclass(frozen=True)
class DecompositionForm:
    omega: DigitWord
    j: object
    blocks: tuple = ()
    reflected: bool = False
    unresolved: bool = False

    def __post_init__(self):
        idx = [b.index for b in self.blocks]
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ValueError("block indices must be strictly increasing")
        if any(b.link not in (0, 1) for b in self.blocks):
            raise ValueError("links must be 0 or 1")


# --------------------------------------------------------------------------
# literals

_TOKEN = re.compile(r"\s*(?:(\()|(\))|(\^inf)|(\{[^}]*\})|(\d+)|(m)|(\.))")


def format_digits(digits, m):
    if m > 9:
        return ".".join(str(d) for d in digits)
    return "".join(str(d) for d in digits)


def _split_digits(text, m, pos=0):
    """Digits of a word literal (no parentheses)."""
    text = text.strip()
    if not text:
        return []
    if m > 9:
        out = []
        for part in text.split("."):
            if part == "m":
                out.append(m)
            elif part.isdigit():
                out.append(int(part))
            else:
                raise ParseError(f"bad digit {part!r}", text, pos)
        return out
    out = []
    for i, ch in enumerate(text):
        if ch == "m":
            out.append(m)
        elif ch.isdigit():
            out.append(int(ch))
        else:
            raise ParseError(f"unexpected character {ch!r}", text, pos + i)
    return out


def parse_word(text, m):
    digits = _split_digits(text, m)
    for i, d in enumerate(digits):
        if d > m:
            raise ParseError(f"digit {d} exceeds m={m}", text, i)
    return DigitWord(tuple(digits), m)


_STREAM_SMALL = re.compile(r"^\s*(?P<pre>[0-9m]*?)\s*(?:\((?P<per>[0-9m]+)\)|(?P<single>\d|m))\^inf\s*$")
_STREAM_LARGE = re.compile(r"^\s*(?P<pre>(?:(?:\d+|m)(?:\.|(?=\()))*?)\s*(?:\((?P<per>[0-9m.]+)\)|(?P<single>\d+|m))\^inf\s*$")
_GEN = re.compile(r"^\s*(?P<pre>[0-9m.]*?)\s*\{(?P<rev>~?)(?P<src>tm|clim)(?::(?P<c0>[0-9m.]+))?(?:\+(?P<off>\d+))?\}\s*$")


def parse_stream(text, m):
    """Parse ``pre(period)^inf``, ``d^inf`` or a generator literal ``pre{tm}``."""
    _check_alphabet(m)
    match = (_STREAM_LARGE if m > 9 else _STREAM_SMALL).match(text)
    if match:
        pre = _split_digits(match.group("pre").rstrip("."), m)
        if match.group("per") is not None:
            per = _split_digits(match.group("per"), m, match.start("per"))
        else:
            single = match.group("single")
            per = [m if single == "m" else int(single)]
        for d in pre + per:
            if d > m:
                raise ParseError(f"digit {d} exceeds m={m}", text)
        return PeriodicStream(tuple(pre), tuple(per), m)
    match = _GEN.match(text)
    if match:
        pre = _split_digits(match.group("pre").rstrip("."), m)
        c0 = _split_digits(match.group("c0") or "", m)
        if match.group("src") == "clim" and not c0:
            raise ParseError("clim generator needs ':c0_minus'", text)
        return GeneratedStream(alphabet_max=m, source=match.group("src"), c0_minus=tuple(c0),
                               prefix_digits=tuple(pre), offset=int(match.group("off") or 0),
                               reflected=bool(match.group("rev")))
    pos = _first_bad(text)
    raise ParseError(f"cannot parse stream literal {text!r}", text, pos)


def _first_bad(text):
    for i, ch in enumerate(text):
        if not (ch.isdigit() or ch in "m.()^inf{}~:+ tcl"):
            return i
    return len(text)
