"""Target reals with a precision oracle, and certified interval arithmetic.

Every target ``zeta`` can be asked for a rational enclosure of width at most
``2**-p``.  Enclosures are nested as ``p`` grows.  Linear forms in the power
basis ``(1, zeta, ..., zeta**n)`` are evaluated to certified enclosures, and
lazily refinable expressions can be compared by precision doubling.
"""

from __future__ import annotations

import enum
import math
import re
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import gmpy2

from . import poly

DEFAULT_P_MAX = 4096
DEFAULT_P_START = 64


class NonConvergent(ArithmeticError):
    pass


class TargetParseError(ValueError):
    def __init__(self, message: str, text: str, position: int):
        super().__init__(f"{message} at position {position}: {text!r}")
        self.text = text
        self.position = position


def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(x)
    return Fraction(x)


def _floor_dyadic(x: Fraction, bits: int) -> Fraction:
    return Fraction(math.floor(x * (1 << bits)), 1 << bits)


def _ceil_dyadic(x: Fraction, bits: int) -> Fraction:
    return Fraction(math.ceil(x * (1 << bits)), 1 << bits)


class RationalInterval:
    """Closed interval ``[lo, hi]`` with rational endpoints.

    Arithmetic is exact on the endpoints, hence trivially outward; call
    :meth:`round_out` to keep endpoint sizes bounded during long chains.
    """

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi=None):
        lo = to_fraction(lo)
        hi = lo if hi is None else to_fraction(hi)
        if lo > hi:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def __setattr__(self, name, value):
        raise AttributeError("RationalInterval is immutable")

    def __reduce__(self):
        return (RationalInterval, (self.lo, self.hi))

    @classmethod
    def point(cls, x) -> "RationalInterval":
        return cls(x, x)

    @classmethod
    def hull(cls, items: Iterable["RationalInterval"]) -> "RationalInterval":
        items = list(items)
        return cls(min(i.lo for i in items), max(i.hi for i in items))

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    def contains(self, x) -> bool:
        if isinstance(x, RationalInterval):
            return self.lo <= x.lo and x.hi <= self.hi
        x = to_fraction(x)
        return self.lo <= x <= self.hi

    def overlaps(self, other: "RationalInterval") -> bool:
        return not (self.hi < other.lo or other.hi < self.lo)

    def round_out(self, bits: int) -> "RationalInterval":
        if self.lo.denominator == 1 and self.hi.denominator == 1:
            return self
        return RationalInterval(_floor_dyadic(self.lo, bits), _ceil_dyadic(self.hi, bits))

    def __add__(self, other):
        if not isinstance(other, RationalInterval):
            other = to_fraction(other)
            return RationalInterval(self.lo + other, self.hi + other)
        return RationalInterval(self.lo + other.lo, self.hi + other.hi)

    __radd__ = __add__

    def __neg__(self):
        return RationalInterval(-self.hi, -self.lo)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, RationalInterval):
            c = to_fraction(other)
            a, b = self.lo * c, self.hi * c
            return RationalInterval(min(a, b), max(a, b))
        ps = (self.lo * other.lo, self.lo * other.hi, self.hi * other.lo, self.hi * other.hi)
        return RationalInterval(min(ps), max(ps))

    __rmul__ = __mul__

    def reciprocal(self) -> "RationalInterval":
        if self.lo <= 0 <= self.hi:
            raise ZeroDivisionError("interval contains zero")
        return RationalInterval(1 / self.hi, 1 / self.lo)

    def __truediv__(self, other):
        if not isinstance(other, RationalInterval):
            c = to_fraction(other)
            return self * (1 / c)
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __abs__(self):
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return RationalInterval(0, max(-self.lo, self.hi))

    def __pow__(self, k: int):
        if k < 0:
            return (self ** (-k)).reciprocal()
        if k == 0:
            return RationalInterval(1)
        if k % 2 == 1 or self.lo >= 0:
            a, b = self.lo ** k, self.hi ** k
            return RationalInterval(min(a, b), max(a, b))
        a = abs(self)
        return RationalInterval(a.lo ** k, a.hi ** k)

    def max(self, other: "RationalInterval") -> "RationalInterval":
        return RationalInterval(max(self.lo, other.lo), max(self.hi, other.hi))

    def min(self, other: "RationalInterval") -> "RationalInterval":
        return RationalInterval(min(self.lo, other.lo), min(self.hi, other.hi))

    def clamp_low(self, floor) -> "RationalInterval":
        floor = to_fraction(floor)
        return RationalInterval(max(self.lo, floor), max(self.hi, floor))

    def certainly_lt(self, other) -> bool:
        other = other if isinstance(other, RationalInterval) else RationalInterval(other)
        return self.hi < other.lo

    def certainly_le(self, other) -> bool:
        other = other if isinstance(other, RationalInterval) else RationalInterval(other)
        return self.hi <= other.lo

    def __eq__(self, other):
        return isinstance(other, RationalInterval) and self.lo == other.lo and self.hi == other.hi

    def __hash__(self):
        return hash((self.lo, self.hi))

    def __repr__(self):
        if self.is_point:
            return f"RationalInterval({self.lo})"
        return f"RationalInterval({float(self.lo):.17g}, {float(self.hi):.17g})"

    def to_float_bounds(self) -> tuple[float, float]:
        """Floats ``a <= lo`` and ``b >= hi``."""
        a, b = float(self.lo), float(self.hi)
        if Fraction(a) > self.lo:
            a = math.nextafter(a, -math.inf)
        if Fraction(b) < self.hi:
            b = math.nextafter(b, math.inf)
        return a, b


def interval_log(iv: RationalInterval) -> tuple[float, float]:
    """Float enclosure of ``log`` over a positive interval."""
    if iv.lo <= 0:
        raise ValueError("log of a nonpositive interval")
    lo = _log_fraction(iv.lo)
    hi = _log_fraction(iv.hi)
    return math.nextafter(math.nextafter(lo, -math.inf), -math.inf), math.nextafter(
        math.nextafter(hi, math.inf), math.inf)


def _log_fraction(x: Fraction) -> float:
    # exact binary exponent extraction avoids float overflow for huge/tiny x
    num, den = x.numerator, x.denominator
    shift = num.bit_length() - den.bit_length()
    if shift > 0:
        den <<= shift
    else:
        num <<= -shift
    return math.log(num / den) + shift * math.log(2.0)


def log_fraction(x) -> float:
    return _log_fraction(to_fraction(x))


def sqrt_interval(x, p: int) -> RationalInterval:
    """Enclosure of ``sqrt(x)`` for rational ``x >= 0`` with width ``<= 2**-p``."""
    return root_interval(x, 2, p)


def root_interval(x, k: int, p: int) -> RationalInterval:
    """Enclosure of the real ``k``-th root of rational ``x >= 0``."""
    x = to_fraction(x)
    if x < 0:
        raise ValueError("negative radicand")
    if x == 0:
        return RationalInterval(0)
    # scale so the integer root carries p fractional bits
    scaled = x * (1 << (k * p))
    lo_int = gmpy2.iroot(gmpy2.mpz(math.floor(scaled)), k)
    hi_int = gmpy2.iroot(gmpy2.mpz(math.ceil(scaled)), k)
    lo = Fraction(int(lo_int[0]), 1 << p)
    hi_num = int(hi_int[0]) + (0 if hi_int[1] else 1)
    hi = Fraction(hi_num, 1 << p)
    return RationalInterval(lo, hi)


@dataclass(frozen=True)
class PowerOfQ:
    """The symbolic real ``scale * Q**exponent`` with rational pieces."""

    Q: Fraction
    exponent: Fraction
    scale: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "Q", to_fraction(self.Q))
        object.__setattr__(self, "exponent", to_fraction(self.exponent))
        object.__setattr__(self, "scale", to_fraction(self.scale))
        if self.Q <= 0:
            raise ValueError("Q must be positive")

    def log2_magnitude(self) -> float:
        return (float(self.exponent) * log_fraction(self.Q) + log_fraction(abs(self.scale) or 1)) / math.log(2)

    def enclosure(self, p: int) -> RationalInterval:
        a, b = self.exponent.numerator, self.exponent.denominator
        base = self.Q ** abs(a)
        mag = abs(self.log2_magnitude())
        bits = p + int(mag) + 8
        if b == 1:
            iv = RationalInterval(base)
        else:
            iv = root_interval(base, b, bits)
        if a < 0:
            iv = iv.reciprocal()
        iv = iv * self.scale
        return iv.round_out(bits + 4)

    def __float__(self) -> float:
        return float(self.scale) * math.exp(float(self.exponent) * log_fraction(self.Q))

    def is_rational(self) -> bool:
        if self.exponent.denominator == 1:
            return True
        return _exact_root(self.Q ** abs(self.exponent.numerator), self.exponent.denominator) is not None

    def exact(self) -> Fraction | None:
        a, b = self.exponent.numerator, self.exponent.denominator
        r = _exact_root(self.Q ** abs(a), b)
        if r is None:
            return None
        if a < 0:
            r = 1 / r
        return r * self.scale

    def to_json(self) -> dict:
        return {"scale": str(self.scale), "Q": str(self.Q), "exponent": str(self.exponent)}


def _exact_root(x: Fraction, k: int) -> Fraction | None:
    if k == 1:
        return x
    n = gmpy2.iroot(gmpy2.mpz(x.numerator), k)
    d = gmpy2.iroot(gmpy2.mpz(x.denominator), k)
    if n[1] and d[1]:
        return Fraction(int(n[0]), int(d[0]))
    return None


# -- targets ------------------------------------------------------------------

class RealTarget:
    """A real number ``zeta`` with an on-demand rational precision oracle.

    Subclasses implement :meth:`_enclose`; this base class caches refinements
    behind a lock so that instances can be shared across worker threads.
    """

    kind: str = "abstract"

    def __init__(self, label: str, degree_bound: int | None):
        self.label = label
        self.degree_bound = degree_bound
        self._lock = threading.Lock()
        self._cache: dict[int, RationalInterval] = {}
        self._float: float | None = None

    def enclosure(self, p: int) -> RationalInterval:
        return approximate(self, p)

    def _enclose(self, p: int) -> RationalInterval:
        raise NotImplementedError

    def __float__(self) -> float:
        if self._float is None:
            self._float = float(approximate(self, 80).mid)
        return self._float

    @property
    def is_rational(self) -> bool:
        return self.degree_bound == 1

    def algebraic_of_degree_at_most(self, n: int) -> bool:
        return self.degree_bound is not None and self.degree_bound <= n

    def __repr__(self):
        return f"{type(self).__name__}({self.label!r})"

    def __eq__(self, other):
        return isinstance(other, RealTarget) and self.label == other.label

    def __hash__(self):
        return hash(self.label)

    def __getstate__(self):
        state = dict(self.__dict__)
        del state["_lock"]
        return state

    def __setstate__(self, state):
        self.__dict__.update(state)
        self._lock = threading.Lock()


class RationalTarget(RealTarget):
    kind = "rational"

    def __init__(self, value, label: str | None = None):
        self.value = to_fraction(value)
        super().__init__(label or f"rat:{self.value.numerator}/{self.value.denominator}", 1)

    def _enclose(self, p: int) -> RationalInterval:
        return RationalInterval(self.value)


class AlgebraicTarget(RealTarget):
    """The unique root of an integer polynomial in a rational interval."""

    kind = "algebraic"

    def __init__(self, coeffs: Sequence[int], lo, hi, label: str | None = None):
        coeffs = tuple(int(c) for c in coeffs)
        if poly.degree(coeffs) < 1:
            raise ValueError("minimal polynomial must be nonconstant")
        if poly.primitive(coeffs) != poly.trim(coeffs) and poly.primitive(coeffs) != tuple(-c for c in poly.trim(coeffs)):
            raise ValueError("minimal polynomial must be primitive")
        lo, hi = to_fraction(lo), to_fraction(hi)
        if lo > hi:
            raise ValueError("isolating interval is empty")
        self.coeffs = poly.trim(coeffs)
        self._sturm = poly.sturm_sequence(self.coeffs)
        if poly.count_roots_closed(self.coeffs, lo, hi, self._sturm) != 1:
            raise ValueError("interval must contain exactly one real root")
        rational = [r for r in poly.rational_roots(self.coeffs) if lo <= r <= hi]
        self.rational_root = rational[0] if rational else None
        deg = 1 if rational else poly.degree(self.coeffs)
        default = "alg:" + ",".join(str(c) for c in self.coeffs) + f"@[{lo},{hi}]"
        super().__init__(label or default, deg)
        self.lo, self.hi = lo, hi
        self._f = poly.squarefree_part(self.coeffs)
        if self.rational_root is not None:
            self._levels = [RationalInterval(self.rational_root)]
        else:
            self._levels = [RationalInterval(lo, hi)]
        self._sign_hi = poly.sign_at(self._f, hi)

    def _enclose(self, p: int) -> RationalInterval:
        target = Fraction(1, 1 << p)
        last = self._levels[-1]
        while last.width > target:
            mid = last.mid
            s = poly.sign_at(self._f, mid)
            if s == 0:
                last = RationalInterval(mid)
            elif s == self._sign_hi:
                last = RationalInterval(last.lo, mid)
            else:
                last = RationalInterval(mid, last.hi)
            self._levels.append(last)
        for iv in self._levels:
            if iv.width <= target:
                return iv
        return last  # pragma: no cover

    def reduce(self, coeffs: Sequence) -> tuple:
        """Remainder of a polynomial in ``zeta`` modulo the minimal polynomial."""
        return poly.rem(coeffs, self.coeffs)


FACTORIAL = "factorial"
SQUARE = "square"
_SEQUENCES = {
    FACTORIAL: lambda l: math.factorial(l),
    SQUARE: lambda l: l * l,
}


class LacunaryTarget(RealTarget):
    """``sum_{l >= 1} base**(-e_l)`` for a strictly increasing exponent sequence.

    Enclosures come from partial sums with the tail bound
    ``sum_{l > L} b**-e_l <= b**-e_{L+1} * b/(b-1) <= 2 * b**-e_{L+1}``.
    """

    kind = "lacunary"

    def __init__(self, base: int, sequence: str = FACTORIAL, label: str | None = None):
        if base < 2:
            raise ValueError("base must be at least 2")
        if sequence not in _SEQUENCES:
            raise ValueError(f"unknown exponent sequence {sequence!r}")
        self.base = int(base)
        self.sequence = sequence
        super().__init__(label or f"lac:{base},{sequence}", None)

    def exponent(self, l: int) -> int:
        return _SEQUENCES[self.sequence](l)

    @property
    def ratio_unbounded(self) -> bool:
        """Whether ``e_{l+1}/e_l`` is unbounded (a Liouville-type series)."""
        return self.sequence == FACTORIAL

    def partial_sum(self, L: int) -> Fraction:
        return sum((Fraction(1, self.base ** self.exponent(l)) for l in range(1, L + 1)), Fraction(0))

    def tail_bound(self, L: int) -> Fraction:
        return Fraction(2, self.base ** self.exponent(L + 1))

    def _enclose(self, p: int) -> RationalInterval:
        target = Fraction(1, 1 << p)
        L = 0
        while self.tail_bound(L) > target:
            L += 1
            if L > 64:
                raise NonConvergent("lacunary truncation did not reach the requested width")
        s = self.partial_sum(L)
        return RationalInterval(s, s + self.tail_bound(L))


def approximate(target: RealTarget, p: int) -> RationalInterval:
    """Rational enclosure of ``target`` of width at most ``2**-p``."""
    if p < 1:
        raise ValueError("precision must be at least one bit")
    cached = target._cache.get(p)
    if cached is not None:
        return cached
    with target._lock:
        iv = target._enclose(p)
        target._cache[p] = iv
    return iv


def power_enclosures(target: RealTarget, n: int, p: int) -> list[RationalInterval]:
    z = approximate(target, p)
    out = [RationalInterval(1)]
    for _ in range(n):
        out.append(out[-1] * z)
    return out


def eval_form(coeffs: Sequence, target: RealTarget, p: int) -> RationalInterval:
    """Certified enclosure of ``sum_j c_j zeta**j``.

    The width is at most ``2**-p * (1 + sum |c_j|)``.
    """
    coeffs = [to_fraction(c) for c in coeffs]
    if all(c == 0 for c in coeffs):
        return RationalInterval(0)
    if isinstance(target, RationalTarget):
        return RationalInterval(poly.evaluate(coeffs, target.value))
    if isinstance(target, AlgebraicTarget) and target.rational_root is not None:
        return RationalInterval(poly.evaluate(coeffs, target.rational_root))
    n = len(coeffs) - 1
    if n == 0:
        return RationalInterval(coeffs[0])
    budget = Fraction(1, 1 << p) * (1 + sum(abs(c) for c in coeffs))
    z0 = approximate(target, 8)
    zmax = max(abs(z0.lo), abs(z0.hi)) + 1
    guard = n * max(1, int(math.log2(float(zmax)) + 1)) + max(1, n.bit_length()) + 2
    q = p + guard
    while True:
        z = approximate(target, q)
        acc = RationalInterval(0)
        for c in reversed(coeffs):
            acc = (acc * z + c).round_out(q + 8)
        if acc.width <= budget:
            return acc
        q += 16


@dataclass(frozen=True)
class PolyExpr:
    """Lazy expression ``sum_k coeffs[k] * zeta**k`` for one target.

    Two expressions over the same algebraic target can be compared exactly
    via remainders modulo the minimal polynomial.
    """

    target: RealTarget
    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", poly.trim(to_fraction(c) for c in self.coeffs))

    def enclosure(self, p: int) -> RationalInterval:
        if not self.coeffs:
            return RationalInterval(0)
        return eval_form(self.coeffs, self.target, p)

    def exact_value(self) -> Fraction | None:
        t = self.target
        if isinstance(t, RationalTarget):
            return poly.evaluate(self.coeffs, t.value)
        if isinstance(t, AlgebraicTarget):
            if t.rational_root is not None:
                return poly.evaluate(self.coeffs, t.rational_root)
            r = t.reduce(self.coeffs)
            if len(r) <= 1:
                return r[0] if r else Fraction(0)
        if not self.coeffs:
            return Fraction(0)
        if len(self.coeffs) == 1:
            return self.coeffs[0]
        return None

    def is_zero(self) -> bool:
        return self.exact_value() == 0

    def __sub__(self, other: "PolyExpr") -> "PolyExpr":
        return PolyExpr(self.target, poly.sub(self.coeffs, other.coeffs))

    def __neg__(self) -> "PolyExpr":
        return PolyExpr(self.target, poly.scale(self.coeffs, -1))


class Lazy:
    """A refinable real given by a precision -> enclosure function."""

    def __init__(self, fn: Callable[[int], RationalInterval], label: str = "lazy"):
        self._fn = fn
        self.label = label

    def enclosure(self, p: int) -> RationalInterval:
        return self._fn(p)

    @staticmethod
    def of(x) -> "Lazy":
        if isinstance(x, Lazy):
            return x
        if hasattr(x, "enclosure"):
            return Lazy(x.enclosure, getattr(x, "label", repr(x)))
        if isinstance(x, RationalInterval):
            return Lazy(lambda p: x, repr(x))
        c = to_fraction(x)
        return Lazy(lambda p: RationalInterval(c), str(c))

    def _combine(self, other, op, name):
        other = Lazy.of(other)
        return Lazy(lambda p: op(self.enclosure(p + 8), other.enclosure(p + 8)).round_out(p + 16),
                    f"({self.label}{name}{other.label})")

    def __add__(self, other):
        return self._combine(other, lambda a, b: a + b, "+")

    def __sub__(self, other):
        return self._combine(other, lambda a, b: a - b, "-")

    def __mul__(self, other):
        return self._combine(other, lambda a, b: a * b, "*")

    def __abs__(self):
        return Lazy(lambda p: abs(self.enclosure(p)), f"|{self.label}|")


class Ordering(enum.Enum):
    LESS = "Less"
    GREATER = "Greater"
    EQUAL = "Equal"
    UNDECIDED = "Undecided"


def _exact_pair(a, b) -> tuple[Fraction, Fraction] | None:
    def exact(x):
        if isinstance(x, (int, Fraction)):
            return to_fraction(x)
        if isinstance(x, PolyExpr):
            return x.exact_value()
        if isinstance(x, RationalInterval) and x.is_point:
            return x.lo
        return None

    ea, eb = exact(a), exact(b)
    if ea is not None and eb is not None:
        return ea, eb
    return None


def certified_compare(a, b, p_max: int = DEFAULT_P_MAX, p_start: int = DEFAULT_P_START) -> Ordering:
    """Order two refinable reals by doubling precision.

    Polynomial expressions in the same algebraic target are first checked for
    exact equality modulo the minimal polynomial; anything else relies on
    interval refinement only and yields ``UNDECIDED`` after ``p_max`` bits.
    """
    pair = _exact_pair(a, b)
    if pair is not None:
        x, y = pair
        return Ordering.LESS if x < y else Ordering.GREATER if x > y else Ordering.EQUAL
    if isinstance(a, PolyExpr) and isinstance(b, PolyExpr) and a.target is b.target:
        if (a - b).is_zero():
            return Ordering.EQUAL
    la, lb = Lazy.of(a), Lazy.of(b)
    p = p_start
    while p <= p_max:
        ia, ib = la.enclosure(p), lb.enclosure(p)
        if ia.hi < ib.lo:
            return Ordering.LESS
        if ia.lo > ib.hi:
            return Ordering.GREATER
        if ia.is_point and ib.is_point and ia.lo == ib.lo:
            return Ordering.EQUAL
        p *= 2
    return Ordering.UNDECIDED


# -- the CLI target mini-language --------------------------------------------

_INT = r"[+-]?\d+"
_RAT = rf"{_INT}(?:/\d+)?|[+-]?\d*\.\d+|[+-]?\d+\.\d*"


def _parse_rational(text: str, token: str, pos: int) -> Fraction:
    if not re.fullmatch(_RAT, token.strip()):
        raise TargetParseError(f"expected a rational number, got {token!r}", text, pos)
    try:
        return Fraction(token.strip())
    except (ValueError, ZeroDivisionError):
        raise TargetParseError(f"invalid rational {token!r}", text, pos) from None


def parse_target(text: str) -> RealTarget:
    """Parse a target specification.

    Grammar::

        target  := "rat:" INT ["/" UINT]
                 | "alg:" INT ("," INT)* "@[" RAT "," RAT "]"
                 | "lac:" UINT "," ("factorial" | "square")
                 | "dec:" DECIMAL

    ``alg`` coefficients are listed from the constant term upward.  ``dec``
    literals denote the exact rational they spell out.
    """
    text = text.strip()
    kind, sep, body = text.partition(":")
    if not sep:
        raise TargetParseError("missing ':' after the target kind", text, 0)
    off = len(kind) + 1
    if kind == "rat":
        if not re.fullmatch(rf"{_INT}(?:/\d+)?", body):
            raise TargetParseError("expected p/q", text, off)
        value = _parse_rational(text, body, off)
        return RationalTarget(value, label=text)
    if kind == "dec":
        if not re.fullmatch(r"[+-]?(?:\d+\.?\d*|\.\d+)", body):
            raise TargetParseError("expected a decimal literal", text, off)
        return RationalTarget(Fraction(body), label=text)
    if kind == "alg":
        at = body.find("@")
        if at < 0:
            raise TargetParseError("expected '@[lo,hi]' after the coefficients", text, off + len(body))
        coeff_text, interval_text = body[:at], body[at + 1:]
        coeffs = []
        pos = off
        for tok in coeff_text.split(","):
            if not re.fullmatch(_INT, tok.strip()):
                raise TargetParseError(f"expected an integer coefficient, got {tok!r}", text, pos)
            coeffs.append(int(tok))
            pos += len(tok) + 1
        ipos = off + at + 1
        m = re.fullmatch(r"\[([^,\]]+),([^,\]]+)\]", interval_text)
        if not m:
            raise TargetParseError("expected '[lo,hi]'", text, ipos)
        lo = _parse_rational(text, m.group(1), ipos + 1)
        hi = _parse_rational(text, m.group(2), ipos + 2 + len(m.group(1)))
        try:
            return AlgebraicTarget(coeffs, lo, hi, label=text)
        except ValueError as exc:
            raise TargetParseError(str(exc), text, ipos) from None
    if kind == "lac":
        parts = body.split(",")
        if len(parts) != 2 or not parts[0].isdigit():
            raise TargetParseError("expected 'base,sequence'", text, off)
        if parts[1] not in _SEQUENCES:
            raise TargetParseError(f"unknown sequence {parts[1]!r}", text, off + len(parts[0]) + 1)
        try:
            return LacunaryTarget(int(parts[0]), parts[1], label=text)
        except ValueError as exc:
            raise TargetParseError(str(exc), text, off) from None
    raise TargetParseError(f"unknown target kind {kind!r}", text, 0)


# Frequently used targets.
def golden_ratio() -> AlgebraicTarget:
    return AlgebraicTarget((-1, -1, 1), 1, 2, label="alg:-1,-1,1@[1,2]")


def sqrt2() -> AlgebraicTarget:
    return AlgebraicTarget((-2, 0, 1), 1, 2, label="alg:-2,0,1@[1,2]")


def cbrt2() -> AlgebraicTarget:
    return AlgebraicTarget((-2, 0, 0, 1), 1, 2, label="alg:-2,0,0,1@[1,2]")


def liouville() -> LacunaryTarget:
    return LacunaryTarget(10, FACTORIAL, label="lac:10,factorial")
