"""Parametrised convex bodies, lattice embeddings and certified gauges.

A body is a finite list of linear forms with per-form bounds ``scale*Q**e``.
Form coefficients are polynomials in the target ``zeta``, so a form applied
to an integer vector is an exact :class:`~pgnlab.realnum.PolyExpr`.

Bodies live in "ambient" coordinates; a :class:`LatticeKind` maps integer
coefficient vectors ``(x, y_1, ..., y_n)`` into that space.  The composition
of the two gives the effective forms used by the enumeration engine.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Sequence

import numpy as np

from . import poly
from .realnum import (
    PolyExpr,
    PowerOfQ,
    RationalInterval,
    RationalTarget,
    RealTarget,
    eval_form,
    to_fraction,
)


class InvalidParameter(ValueError):
    pass


class Family(enum.Enum):
    PRIMAL = "Primal"
    LINEAR_FORM = "LinearForm"
    COMPRESSED = "Compressed"
    CHI_A = "ChiA"
    CHI_B = "ChiB"
    CHI_C = "ChiC"

    @classmethod
    def parse(cls, text: str) -> "Family":
        for f in cls:
            if f.value.lower() == text.lower() or f.name.lower() == text.lower():
                return f
        raise InvalidParameter(f"unknown body family {text!r}")


class LatticeTag(enum.Enum):
    LAMBDA = "Lambda"
    LAMBDA_STAR = "LambdaStar"
    LAMBDA_PLUS = "LambdaPlus"


def _zeta_power(k: int) -> tuple:
    return tuple([0] * k + [1])


@dataclass(frozen=True)
class LatticeKind:
    tag: LatticeTag
    target: RealTarget
    n: int

    def matrix(self) -> list[list[tuple]]:
        """Embedding matrix with entries polynomial in ``zeta``."""
        m = self.n + 1
        rows = [[() for _ in range(m)] for _ in range(m)]
        if self.tag is LatticeTag.LAMBDA_PLUS:
            for i in range(m):
                rows[i][i] = (1,)
        elif self.tag is LatticeTag.LAMBDA:
            rows[0][0] = (1,)
            for i in range(1, m):
                rows[i][0] = _zeta_power(i)
                rows[i][i] = (-1,)
        else:
            for k in range(m):
                rows[0][k] = _zeta_power(k)
            for i in range(1, m):
                rows[i][i] = (1,)
        return rows

    def determinant(self) -> tuple:
        return _poly_det(self.matrix())

    def is_unimodular(self) -> bool:
        d = self.determinant()
        return len(d) == 1 and abs(d[0]) == 1

    def embed(self, coeffs: Sequence[int], p: int = 64) -> list[RationalInterval]:
        if len(coeffs) != self.n + 1:
            raise InvalidParameter(f"expected {self.n + 1} coefficients, got {len(coeffs)}")
        out = []
        for row in self.matrix():
            expr = _combine(row, coeffs)
            out.append(eval_form(expr, self.target, p) if expr else RationalInterval(0))
        return out


def _poly_det(mat: list[list[tuple]]) -> tuple:
    m = len(mat)
    if m == 1:
        return poly.trim(mat[0][0])
    total: tuple = ()
    for k in range(m):
        if not mat[0][k]:
            continue
        minor = [row[:k] + row[k + 1:] for row in mat[1:]]
        term = poly.mul(mat[0][k], _poly_det(minor))
        total = poly.add(total, term) if k % 2 == 0 else poly.sub(total, term)
    return total


def _combine(row: Sequence[tuple], coeffs: Sequence[int]) -> tuple:
    acc: tuple = ()
    for entry, c in zip(row, coeffs):
        if c and entry:
            acc = poly.add(acc, poly.scale(entry, c))
    return acc


@dataclass(frozen=True)
class Form:
    coeffs: tuple          # one polynomial in zeta per ambient coordinate
    bound: PowerOfQ
    tag: str = "symbolic"  # "exact" when the bound is rational

    def to_json(self) -> dict:
        return {
            "coeffs": [[str(to_fraction(c)) for c in p] for p in self.coeffs],
            "bound": self.bound.to_json(),
            "tag": self.tag,
        }


def _form(coeffs, Q, exponent, scale=1) -> Form:
    b = PowerOfQ(Q, Fraction(exponent), Fraction(scale))
    return Form(tuple(poly.trim(c) for c in coeffs), b, "exact" if b.is_rational() else "symbolic")


@dataclass(frozen=True)
class BodySpec:
    family: Family
    n: int
    Q: Fraction
    target: RealTarget
    forms: tuple
    param: Fraction | None = None
    bounded: bool = True

    @property
    def dimension(self) -> int:
        return self.n + 1

    def default_lattice(self) -> LatticeKind:
        tag = LatticeTag.LAMBDA if self.family is Family.PRIMAL else LatticeTag.LAMBDA_PLUS
        return LatticeKind(tag, self.target, self.n)

    def effective_forms(self, lattice: LatticeKind | None = None) -> list[Form]:
        """Forms pulled back to integer coefficient vectors."""
        lattice = lattice or self.default_lattice()
        emb = lattice.matrix()
        m = self.n + 1
        out = []
        for f in self.forms:
            row = []
            for k in range(m):
                acc: tuple = ()
                for l in range(m):
                    if f.coeffs[l] and emb[l][k]:
                        acc = poly.add(acc, poly.mul(f.coeffs[l], emb[l][k]))
                row.append(acc)
            out.append(Form(tuple(row), f.bound, f.tag))
        return out

    def float_matrix(self, lattice: LatticeKind | None = None) -> np.ndarray:
        """Float approximation of ``diag(1/bound) @ forms``."""
        z = float(self.target)
        rows = []
        for f in self.effective_forms(lattice):
            inv = 1.0 / float(f.bound)
            rows.append([poly.evaluate([float(c) for c in p], z) * inv if p else 0.0 for p in f.coeffs])
        return np.array(rows, dtype=float)

    def to_json(self) -> dict:
        return {
            "family": self.family.value,
            "n": self.n,
            "Q": str(self.Q),
            "target": self.target.label,
            "param": None if self.param is None else str(self.param),
            "bounded": self.bounded,
            "forms": [f.to_json() for f in self.forms],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)


def make_body(family: Family | str, n: int, Q, target: RealTarget, param=None) -> BodySpec:
    """Build one of the parametrised bodies.

    ``param`` is the compression factor ``c`` for ``Compressed`` and the
    slab half-width ``R`` for ``ChiB``.
    """
    if isinstance(family, str):
        family = Family.parse(family)
    Q = to_fraction(Q)
    if n < 1:
        raise InvalidParameter("n must be at least 1")
    if Q <= 1:
        raise InvalidParameter("Q must exceed 1")
    m = n + 1
    e = [() for _ in range(m)]
    inv_n = Fraction(1, n)

    def unit(i):
        r = list(e)
        r[i] = (1,)
        return r

    linear = [_zeta_power(t) for t in range(m)]
    derivative = [()] + [poly.scale(_zeta_power(t - 1), t) for t in range(1, m)]
    if family is Family.PRIMAL:
        forms = [_form(unit(0), Q, 1)] + [_form(unit(i), Q, -inv_n) for i in range(1, m)]
        return BodySpec(family, n, Q, target, tuple(forms))
    y_forms = [_form(unit(t), Q, inv_n) for t in range(1, m)]
    if family is Family.LINEAR_FORM:
        return BodySpec(family, n, Q, target, tuple(y_forms + [_form(linear, Q, -1)]))
    if family is Family.COMPRESSED:
        if param is None or to_fraction(param) <= 0:
            raise InvalidParameter("compression factor must be positive")
        c = to_fraction(param)
        forms = y_forms + [_form(linear, Q, -1), _form(derivative, Q, inv_n, c)]
        return BodySpec(family, n, Q, target, tuple(forms), c)
    if family is Family.CHI_A:
        return BodySpec(family, n, Q, target, (_form(linear, Q, -1),), bounded=False)
    if family is Family.CHI_B:
        if param is None or to_fraction(param) <= 0:
            raise InvalidParameter("R must be positive")
        R = to_fraction(param)
        return BodySpec(family, n, Q, target, (_form(derivative, Q, 0, R),), R, bounded=False)
    if family is Family.CHI_C:
        return BodySpec(family, n, Q, target, tuple(y_forms), bounded=False)
    raise InvalidParameter(f"unsupported family {family}")  # pragma: no cover


def intersect(*bodies: BodySpec) -> BodySpec:
    """Intersection of bodies sharing ``n``, ``Q`` and the target."""
    first = bodies[0]
    for b in bodies[1:]:
        if (b.n, b.Q, b.target) != (first.n, first.Q, first.target):
            raise InvalidParameter("bodies must share n, Q and target")
    forms = tuple(f for b in bodies for f in b.forms)
    bounded = _forms_span(forms, first.n + 1)
    return BodySpec(first.family, first.n, first.Q, first.target, forms, first.param, bounded)


def _forms_span(forms, m) -> bool:
    # rank over Q[zeta] is at least the rank at a generic rational point
    probe = Fraction(7, 13)
    rows = [[poly.evaluate(p, probe) if p else Fraction(0) for p in f.coeffs] for f in forms]
    return integer_rank([[Fraction(v) for v in r] for r in rows]) == m if rows else False


# -- gauges -------------------------------------------------------------------

class Gauge:
    """Refinable enclosure of ``max_i |form_i(v)| / bound_i``."""

    def __init__(self, values: list[PolyExpr], bounds: list[PowerOfQ], label: str = "gauge"):
        self.values = values
        self.bounds = bounds
        self.label = label
        self._exact: Fraction | None | bool = False
        self._float: float | None = None
        self._cache: dict[int, RationalInterval] = {}

    def _term(self, i: int, p: int) -> RationalInterval:
        v = abs(self.values[i].enclosure(p))
        return v * self.bounds[i].enclosure(p).reciprocal()

    def enclosure(self, p: int) -> RationalInterval:
        ex = self.exact()
        if ex is not None:
            return RationalInterval(ex)
        hit = self._cache.get(p)
        if hit is None:
            hit = self._cache[p] = self._enclose(p)
        return hit

    def _enclose(self, p: int) -> RationalInterval:
        target = Fraction(1, 1 << p)
        q = p + 16
        while True:
            terms = [self._term(i, q) for i in range(len(self.values))]
            iv = terms[0]
            for t in terms[1:]:
                iv = iv.max(t)
            if iv.width <= target:
                return iv
            q += max(16, q // 2)

    def relative_enclosure(self, bits: int = 80) -> RationalInterval:
        """Enclosure with width at most ``2**-bits`` times the value."""
        f = float(self)
        scale = 0 if f == 0 or not math.isfinite(f) else max(0, -math.floor(math.log2(f)))
        return self.enclosure(bits + scale + 2)

    def exact(self) -> Fraction | None:
        if self._exact is False:
            vals = [v.exact_value() for v in self.values]
            bnds = [b.exact() for b in self.bounds]
            if all(v is not None for v in vals) and all(b is not None for b in bnds):
                self._exact = max(abs(v) / b for v, b in zip(vals, bnds))
            else:
                self._exact = None
        return self._exact

    def active_terms(self, p: int = 96) -> list[int]:
        """Indices of forms that may attain the maximum."""
        terms = [self._term(i, p) for i in range(len(self.values))]
        top = max(t.lo for t in terms)
        return [i for i, t in enumerate(terms) if t.hi >= top]

    def __float__(self) -> float:
        if self._float is None:
            ex = self.exact()
            if ex is not None:
                self._float = float(ex)
            else:
                self._float = float(self.enclosure(64).mid) if self._coarse_ok() else float(
                    self.relative_enclosure(60).mid)
        return self._float

    def _coarse_ok(self) -> bool:
        iv = self.enclosure(64)
        return iv.lo > 0 and iv.width < iv.lo * Fraction(1, 1 << 40)


def gauge(body: BodySpec, point: Sequence[int], lattice: LatticeKind | None = None,
          forms: list[Form] | None = None) -> Gauge:
    """Gauge of an integer coefficient vector for the body and lattice."""
    if not body.bounded:
        raise InvalidParameter("gauge requires a bounded body")
    point = tuple(int(c) for c in point)
    if not any(point):
        raise InvalidParameter("gauge of the zero vector")
    forms = forms or body.effective_forms(lattice)
    values = [PolyExpr(body.target, _combine(f.coeffs, point)) for f in forms]
    return Gauge(values, [f.bound for f in forms], label=str(point))


def gauge_ordering_exact(a: Gauge, b: Gauge) -> int | None:
    """Exact comparison of two gauges when it can be decided symbolically.

    Returns -1, 0, 1, or ``None`` if interval refinement is required.  The
    symbolic route applies when both maxima are attained by forms sharing a
    bound, where equality reduces to ``|u| = |v|`` for expressions in zeta.
    """
    ea, eb = a.exact(), b.exact()
    if ea is not None and eb is not None:
        return (ea > eb) - (ea < eb)
    ta, tb = a.active_terms(), b.active_terms()
    for i in ta:
        for j in tb:
            if a.bounds[i] != b.bounds[j]:
                continue
            u, v = a.values[i], b.values[j]
            if (u - v).is_zero() or (u - (-v)).is_zero():
                return 0
    return None


# -- embedding of the whole body in floats (for kernels) ----------------------

def scaled_basis(body: BodySpec, U: Sequence[Sequence[int]], lattice: LatticeKind | None = None,
                 bits: int = 80) -> np.ndarray:
    """Matrix whose column ``j`` is the scaled image of ``U[:, j]``.

    Entry ``(i, j)`` is ``form_i(U e_j) / bound_i`` rounded from a certified
    enclosure with relative accuracy ``2**-bits``.
    """
    forms = body.effective_forms(lattice)
    U = [list(map(int, row)) for row in U]
    m = len(U)
    out = np.zeros((len(forms), m))
    for j in range(m):
        col = [U[i][j] for i in range(m)]
        for i, f in enumerate(forms):
            expr = _combine(f.coeffs, col)
            if not expr:
                continue
            pe = PolyExpr(body.target, expr)
            ex = pe.exact_value()
            bnd = f.bound
            if ex == 0:
                continue
            if ex is not None and bnd.exact() is not None:
                out[i, j] = float(ex / bnd.exact())
                continue
            val = float(eval_form(expr, body.target, 64).mid)
            mag = abs(val) / max(float(bnd), 1e-300)
            p = bits + (max(0, -math.floor(math.log2(mag))) if mag > 0 else 200)
            iv = eval_form(expr, body.target, p) * bnd.enclosure(p + 8).reciprocal()
            out[i, j] = float(iv.mid)
    return out


def exact_rows(body: BodySpec, U: Sequence[Sequence[int]], lattice: LatticeKind | None = None,
               limit: int = 1 << 40) -> tuple[np.ndarray, np.ndarray]:
    """Integer images of the rows of :func:`scaled_basis` that are rational.

    Returns ``(Z, groups)``.  For a row with ``groups[i] >= 0`` the true scaled
    value at ``U u`` is ``(Z[i] @ u) * s_g`` where ``s_g`` depends only on the
    group, so weights of two points in the same group compare exactly as
    integers.  Other rows get group ``-1``.
    """
    forms = body.effective_forms(lattice)
    U = [list(map(int, row)) for row in U]
    m = len(U)
    Z = np.zeros((len(forms), m), dtype=np.int64)
    groups = np.full(len(forms), -1, dtype=np.int64)
    keys: dict = {}
    for i, f in enumerate(forms):
        vals = []
        for j in range(m):
            expr = _combine(f.coeffs, [U[a][j] for a in range(m)])
            ex = PolyExpr(body.target, expr).exact_value() if expr else Fraction(0)
            if ex is None:
                break
            vals.append(ex)
        else:
            den = math.lcm(*(v.denominator for v in vals))
            ints = [int(v * den) for v in vals]
            if any(ints) and max(abs(x) for x in ints) < limit:
                b = f.bound
                key = (b.Q, b.exponent, b.scale * den)
                groups[i] = keys.setdefault(key, len(keys))
                Z[i] = ints
    return Z, groups


# -- exact linear algebra helpers --------------------------------------------

def integer_rank(rows: Sequence[Sequence]) -> int:
    """Exact rank of a rational matrix (fraction-free elimination)."""
    mat = [[to_fraction(v) for v in r] for r in rows]
    if not mat:
        return 0
    rank = 0
    ncols = len(mat[0])
    for col in range(ncols):
        piv = next((r for r in range(rank, len(mat)) if mat[r][col] != 0), None)
        if piv is None:
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        for r in range(rank + 1, len(mat)):
            if mat[r][col] != 0:
                f = mat[r][col] / mat[rank][col]
                mat[r] = [a - f * b for a, b in zip(mat[r], mat[rank])]
        rank += 1
    return rank


# -- polar sandwich ------------------------------------------------------------

def primal_vertices(n: int, Q) -> tuple[list[tuple], list[PowerOfQ]]:
    """Vertices of the primal box: sign patterns and the symbolic half-sides."""
    Q = to_fraction(Q)
    bounds = [PowerOfQ(Q, 1)] + [PowerOfQ(Q, Fraction(-1, n))] * n
    return list(product((-1, 1), repeat=n + 1)), bounds


@dataclass(frozen=True)
class SandwichResult:
    polar_gauge: RationalInterval
    box_gauge: RationalInterval
    inner: bool     # g_box <= g_polar
    outer: bool     # g_polar <= (n+1) g_box

    @property
    def ok(self) -> bool:
        return self.inner and self.outer


def sandwich_check(n: int, Q, target: RealTarget, point: Sequence[int], p: int = 96) -> SandwichResult:
    """Compare the polar body of the primal box with the reciprocal box.

    For a point ``z`` embedded by the dual lattice, the polar gauge is
    ``max_v <v, z>`` over the vertices ``v`` of the primal box, which equals
    ``Q |z_0| + Q**(-1/n) sum |z_i|``.  The reciprocal box is the linear-form
    body.  The two gauges satisfy ``g_box <= g_polar <= (n+1) g_box``.
    """
    Q = to_fraction(Q)
    lat = LatticeKind(LatticeTag.LAMBDA_STAR, target, n)
    z = lat.embed(point, p + 32)
    signs_list, bounds = primal_vertices(n, Q)
    encl = [b.enclosure(p + 32) for b in bounds]
    polar = None
    for signs in signs_list:
        acc = RationalInterval(0)
        for s, zi, bi in zip(signs, z, encl):
            acc = acc + zi * bi * s
        polar = acc if polar is None else polar.max(acc)
    box = make_body(Family.LINEAR_FORM, n, Q, target)
    g = gauge(box, point).enclosure(p)
    inner = not polar.certainly_lt(g)
    outer = not (g * (n + 1)).certainly_lt(polar)
    return SandwichResult(polar, g, inner, outer)


def body_volume_linear_form(n: int) -> int:
    """Volume of the linear-form body (independent of Q)."""
    return 2 ** (n + 1)


def is_rational_target(target: RealTarget) -> bool:
    return isinstance(target, RationalTarget)
