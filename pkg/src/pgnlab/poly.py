"""Exact dense univariate polynomials over Q.

Polynomials are tuples of coefficients in increasing degree order,
``(c0, c1, ..., ck)``, with trailing zeros stripped.  The zero polynomial
is the empty tuple.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import zip_longest
from math import gcd
from typing import Sequence

Poly = tuple


def trim(p: Sequence) -> Poly:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return tuple(p)


def degree(p: Sequence) -> int:
    return len(trim(p)) - 1


def add(p: Sequence, q: Sequence) -> Poly:
    return trim(a + b for a, b in zip_longest(p, q, fillvalue=0))


def sub(p: Sequence, q: Sequence) -> Poly:
    return trim(a - b for a, b in zip_longest(p, q, fillvalue=0))


def scale(p: Sequence, c) -> Poly:
    return trim(c * a for a in p)


def mul(p: Sequence, q: Sequence) -> Poly:
    if not p or not q:
        return ()
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(q):
            out[i + j] += a * b
    return trim(out)


def derivative(p: Sequence) -> Poly:
    return trim(k * p[k] for k in range(1, len(p)))


def evaluate(p: Sequence, x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def sign_at(p: Sequence, x) -> int:
    v = evaluate(p, x)
    return (v > 0) - (v < 0)


def divmod_poly(p: Sequence, q: Sequence) -> tuple[Poly, Poly]:
    q = trim(q)
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    r = [Fraction(c) for c in trim(p)]
    dq = len(q) - 1
    lead = Fraction(q[-1])
    if len(r) - 1 < dq:
        return (), trim(r)
    quot = [Fraction(0)] * (len(r) - dq)
    for k in range(len(r) - 1 - dq, -1, -1):
        c = r[k + dq] / lead
        quot[k] = c
        if c:
            for j in range(dq + 1):
                r[k + j] -= c * q[j]
    return trim(quot), trim(r[:dq])


def rem(p: Sequence, q: Sequence) -> Poly:
    return divmod_poly(p, q)[1]


def monic(p: Sequence) -> Poly:
    p = trim(p)
    if not p:
        return ()
    lead = Fraction(p[-1])
    return tuple(Fraction(c) / lead for c in p)


def poly_gcd(p: Sequence, q: Sequence) -> Poly:
    a, b = trim(p), trim(q)
    while b:
        a, b = b, rem(a, b)
    return monic(a)


def squarefree_part(p: Sequence) -> Poly:
    p = trim(p)
    if len(p) <= 2:
        return monic(p)
    g = poly_gcd(p, derivative(p))
    if len(g) <= 1:
        return monic(p)
    return monic(divmod_poly(p, g)[0])


def primitive(p: Sequence) -> tuple[int, ...]:
    """Integer primitive representative of a rational polynomial (same sign)."""
    p = trim(Fraction(c) for c in p)
    if not p:
        return ()
    den = 1
    for c in p:
        den = den * c.denominator // gcd(den, c.denominator)
    ints = [int(c * den) for c in p]
    g = 0
    for c in ints:
        g = gcd(g, c)
    return tuple(c // g for c in ints)


def height(p: Sequence) -> int:
    return max((abs(int(c)) for c in p), default=0)


# -- Sturm sequences ---------------------------------------------------------

def sturm_sequence(p: Sequence) -> list[Poly]:
    f = squarefree_part(p)
    seq = [f, derivative(f)]
    while seq[-1]:
        r = rem(seq[-2], seq[-1])
        if not r:
            break
        seq.append(scale(r, -1))
    return [s for s in seq if s]


def _variations(seq: list[Poly], x) -> int:
    signs = [s for s in (sign_at(f, x) for f in seq) if s]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_roots(p: Sequence, lo, hi, seq: list[Poly] | None = None) -> int:
    """Number of distinct real roots in the half-open interval (lo, hi]."""
    seq = seq if seq is not None else sturm_sequence(p)
    return _variations(seq, lo) - _variations(seq, hi)


def count_roots_closed(p: Sequence, lo, hi, seq: list[Poly] | None = None) -> int:
    seq = seq if seq is not None else sturm_sequence(p)
    extra = 1 if sign_at(seq[0], lo) == 0 else 0
    return count_roots(p, lo, hi, seq) + extra


def cauchy_bound(p: Sequence) -> Fraction:
    p = trim(p)
    lead = abs(Fraction(p[-1]))
    return 1 + max((abs(Fraction(c)) / lead for c in p[:-1]), default=Fraction(0))


def isolate_real_roots(p: Sequence) -> list[tuple[Fraction, Fraction]]:
    """Disjoint isolating intervals ``[lo, hi]`` for all distinct real roots.

    Degenerate intervals ``lo == hi`` mark exact rational roots.  Intervals
    are returned in increasing order; each contains exactly one root.
    """
    p = trim(p)
    if len(p) <= 1:
        return []
    seq = sturm_sequence(p)
    f = seq[0]
    b = cauchy_bound(f)
    out: list[tuple[Fraction, Fraction]] = []
    stack = [(-b, b)]
    while stack:
        lo, hi = stack.pop()
        k = count_roots(f, lo, hi, seq)
        if k == 0:
            continue
        if k == 1:
            if sign_at(f, hi) == 0:
                out.append((hi, hi))
                continue
            # the count covers (lo, hi]; move lo off a neighbouring root
            while sign_at(f, lo) == 0:
                mid = (lo + hi) / 2
                if count_roots(f, mid, hi, seq) == 1:
                    lo = mid
                else:
                    hi = mid
            out.append((lo, hi))
            continue
        mid = (lo + hi) / 2
        stack.append((lo, mid))
        stack.append((mid, hi))
    out.sort()
    return out


def refine_root(p: Sequence, lo: Fraction, hi: Fraction, width: Fraction) -> tuple[Fraction, Fraction]:
    """Bisect an isolating interval of a squarefree-part root down to ``width``."""
    if lo == hi:
        return lo, hi
    f = squarefree_part(p)
    s_hi = sign_at(f, hi)
    if s_hi == 0:
        return hi, hi
    if sign_at(f, lo) == 0:
        raise ValueError("isolating interval has a root at its excluded left end")
    while hi - lo > width:
        mid = (lo + hi) / 2
        s = sign_at(f, mid)
        if s == 0:
            return mid, mid
        if s == s_hi:
            hi = mid
        else:
            lo = mid
    return lo, hi


def rational_roots(p: Sequence) -> list[Fraction]:
    """All rational roots of an integer polynomial (rational root theorem)."""
    q = primitive(p)
    if not q:
        return []
    roots = set()
    k = 0
    while k < len(q) and q[k] == 0:
        k += 1
    if k:
        roots.add(Fraction(0))
    q = q[k:]
    if len(q) <= 1:
        return sorted(roots)
    a0, an = abs(q[0]), abs(q[-1])
    for num in _divisors(a0):
        for den in _divisors(an):
            for cand in (Fraction(num, den), Fraction(-num, den)):
                if evaluate(q, cand) == 0:
                    roots.add(cand)
    return sorted(roots)


def _divisors(m: int) -> list[int]:
    m = abs(m)
    small, large = [], []
    d = 1
    while d * d <= m:
        if m % d == 0:
            small.append(d)
            if d * d != m:
                large.append(m // d)
        d += 1
    return small + large[::-1]
