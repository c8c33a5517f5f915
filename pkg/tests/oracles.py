"""Independent reference computations used only by the tests.

Nothing here imports the enumeration engine: minima come from a plain scan
of a coordinate box in mpmath, ranked at 60 significant digits.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import mpmath

DPS = 60


def _rank(vectors) -> int:
    rows = [[Fraction(v) for v in vec] for vec in vectors]
    r = 0
    cols = len(rows[0]) if rows else 0
    for c in range(cols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c] / rows[r][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        r += 1
    return r


def mp_value(target) -> mpmath.mpf:
    iv = target.enclosure(220)
    return mpmath.mpf(iv.mid.numerator) / iv.mid.denominator


def primal_gauge(point, zeta, n, Q):
    x, ys = point[0], point[1:]
    Q = mpmath.mpf(Q.numerator) / Q.denominator
    g = abs(mpmath.mpf(x)) / Q
    s = Q ** (mpmath.mpf(1) / n)
    for t, y in enumerate(ys, start=1):
        g = max(g, abs(zeta ** t * x - y) * s)
    return g


def linear_form_gauge(point, zeta, n, Q):
    Q = mpmath.mpf(Q.numerator) / Q.denominator
    s = Q ** (mpmath.mpf(1) / n)
    g = max((abs(mpmath.mpf(a)) / s for a in point[1:]), default=mpmath.mpf(0))
    val = sum(mpmath.mpf(a) * zeta ** t for t, a in enumerate(point))
    return max(g, Q * abs(val))


def _primal_box(zeta_f, n, Q, B):
    Qf = float(Q)
    r = B * Qf ** (-1.0 / n) * (1 + 1e-9) + 1e-12
    for x in range(0, int(math.floor(B * Qf * (1 + 1e-9))) + 1):
        ranges = []
        for t in range(1, n + 1):
            c = zeta_f ** t * x
            ranges.append(range(math.ceil(c - r), math.floor(c + r) + 1))
        for ys in itertools.product(*ranges):
            if x == 0 and not any(ys):
                continue
            if x == 0 and next(y for y in ys if y) < 0:
                continue
            yield (x,) + ys


def _linear_form_box(zeta_f, n, Q, B):
    Qf = float(Q)
    a_max = int(math.floor(B * Qf ** (1.0 / n) * (1 + 1e-9)))
    r = B / Qf * (1 + 1e-9) + 1e-12
    for tail in itertools.product(range(-a_max, a_max + 1), repeat=n):
        s = sum(a * zeta_f ** t for t, a in enumerate(tail, start=1))
        for a0 in range(math.ceil(-s - r), math.floor(-s + r) + 1):
            p = (a0,) + tail
            if not any(p):
                continue
            first = next(c for c in p if c)
            if first > 0:
                yield p


def naive_minima(target, n, Q, family="Primal"):
    """All ``n + 1`` successive minima by scanning boxes of doubling size."""
    Q = Fraction(Q)
    with mpmath.workdps(DPS):
        zeta = mp_value(target)
        zf = float(zeta)
        box, gauge = ((_primal_box, primal_gauge) if family == "Primal"
                      else (_linear_form_box, linear_form_gauge))
        B = 1.0 / float(Q)
        while True:
            pts = list(box(zf, n, Q, B))
            if pts and _rank(pts) == n + 1:
                scored = sorted((gauge(p, zeta, n, Q), p) for p in pts)
                chosen, lams = [], []
                for g, p in scored:
                    if g > B * (1 + 1e-6):
                        break
                    if _rank(chosen + [p]) > len(chosen):
                        chosen.append(p)
                        lams.append(g)
                    if len(chosen) == n + 1:
                        return lams, chosen
            B *= 2


def continued_fraction_denominators(target, limit):
    """Convergent denominators of ``target`` up to ``limit``."""
    with mpmath.workdps(DPS):
        x = mp_value(target)
        q_prev, q = 0, 1
        out = []
        while q <= limit:
            a = int(mpmath.floor(x))
            q_prev, q = q, a * q + q_prev
            frac = x - a
            if frac == 0:
                break
            x = 1 / frac
            if q <= limit:
                out.append(q)
        return out
