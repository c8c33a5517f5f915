"""Approximation of a real target by algebraic numbers of bounded degree and height.

The central quantity is ``w*(zeta, H) = -log(rho)/log(H) - 1`` where ``rho``
is the smallest ratio ``|P(zeta)/P'(zeta)|`` over nonzero integer polynomials
of degree at most ``n`` and height at most ``H``.  A compiled scan ranks
candidates by a certified lower bound; the survivors are compared exactly.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from . import kernels, poly
from .geometry import InvalidParameter
from .minima import BudgetExceeded, CertificationFailed
from .realnum import (
    AlgebraicTarget,
    LacunaryTarget,
    RationalInterval,
    RationalTarget,
    RealTarget,
    eval_form,
    interval_log,
    to_fraction,
)

DEFAULT_CAP = 10 ** 9
DEFAULT_PRECISION = 96
MAX_PRECISION = 4096


class TargetIsAlgebraicOfLowHeight(ValueError):
    """Some polynomial in the search range vanishes at the target."""

    def __init__(self, coeffs: Sequence[int]):
        super().__init__(f"the target is a root of {poly_str(coeffs)}")
        self.coeffs = tuple(coeffs)


class DerivativeVanishes(ArithmeticError):
    pass


class NoRealRoot(ValueError):
    pass


class FactorizationUnsupported(ValueError):
    """The height of the root could not be pinned down exactly."""

    def __init__(self, witness: "AlgebraicWitness"):
        super().__init__("reducible polynomial of degree >= 4: height of the root is only bounded")
        self.witness = witness


def poly_str(coeffs: Sequence[int]) -> str:
    terms = []
    for k in range(len(coeffs) - 1, -1, -1):
        c = coeffs[k]
        if not c:
            continue
        mono = "" if k == 0 else ("x" if k == 1 else f"x^{k}")
        mag = abs(c)
        body = f"{mag}" if not mono else (mono if mag == 1 else f"{mag}{mono}")
        terms.append(("-" if c < 0 else "+", body))
    if not terms:
        return "0"
    head = ("-" if terms[0][0] == "-" else "") + terms[0][1]
    return head + "".join(f" {s} {b}" for s, b in terms[1:])


def representative(coeffs: Sequence[int]) -> tuple[int, ...]:
    """Sign-normalised coefficients: the highest nonzero coefficient is positive."""
    c = tuple(int(x) for x in coeffs)
    t = poly.trim(c)
    if t and t[-1] < 0:
        c = tuple(-x for x in c)
    return c


# -- polynomial records ----------------------------------------------------------

@dataclass(frozen=True)
class PolynomialRecord:
    coeffs: tuple
    height: int
    value: RationalInterval | None = None
    derivative: RationalInterval | None = None
    ratio: RationalInterval | None = None

    @property
    def degree(self) -> int:
        return poly.degree(self.coeffs)

    @property
    def primitive(self) -> bool:
        return math.gcd(*self.coeffs) == 1

    def to_json(self) -> dict:
        out = {"coeffs": list(self.coeffs), "polynomial": poly_str(self.coeffs), "height": self.height,
               "degree": self.degree, "primitive": self.primitive}
        for name in ("value", "derivative", "ratio"):
            iv = getattr(self, name)
            if iv is not None:
                out[name] = [float(iv.lo), float(iv.hi)]
        return out


def polynomial_record(coeffs: Sequence[int], target: RealTarget | None = None,
                      p: int = DEFAULT_PRECISION) -> PolynomialRecord:
    c = representative(coeffs)
    h = poly.height(c)
    if target is None:
        return PolynomialRecord(c, h)
    val = abs(eval_form(c, target, p))
    der = abs(eval_form(poly.derivative(c), target, p))
    ratio = val / der if der.lo > 0 else None
    return PolynomialRecord(c, h, val, der, ratio)


def polynomial_count(n: int, H: int) -> int:
    return ((2 * H + 1) ** (n + 1) - 1) // 2


def enumerate_polynomials(n: int, H: int, target: RealTarget | None = None,
                          cap: int = DEFAULT_CAP) -> Iterator[PolynomialRecord]:
    """One representative per sign pair of nonzero polynomials with degree <= n and height <= H.

    The stream is in lexicographic order of the coefficient vector (constant
    term first); non-primitive polynomials are included, as the count
    ``((2H+1)**(n+1) - 1)/2`` requires.
    """
    if n < 1 or H < 1:
        raise InvalidParameter("need n >= 1 and H >= 1")
    if (2 * H + 1) ** (n + 1) > cap:
        raise BudgetExceeded(f"(2H+1)^(n+1) = {(2 * H + 1) ** (n + 1)} exceeds the cap {cap}")
    for c in itertools.product(range(-H, H + 1), repeat=n + 1):
        t = poly.trim(c)
        if t and t[-1] > 0:
            yield polynomial_record(c, target)


# -- exact zero tests ----------------------------------------------------------------

def vanishes_at(coeffs: Sequence, target: RealTarget) -> bool | None:
    """Whether the polynomial vanishes at the target; ``None`` when undecidable here."""
    c = poly.trim(to_fraction(x) for x in coeffs)
    if not c:
        return True
    if len(c) == 1:
        return False
    if isinstance(target, RationalTarget):
        return poly.evaluate(c, target.value) == 0
    if isinstance(target, AlgebraicTarget):
        if target.rational_root is not None:
            return poly.evaluate(c, target.rational_root) == 0
        g = poly.poly_gcd(c, target.coeffs)
        if poly.degree(g) < 1:
            return False
        return poly.count_roots_closed(g, target.lo, target.hi) == 1
    if isinstance(target, LacunaryTarget):
        return False  # these series are transcendental
    return None


def _nonzero_enclosure(coeffs: Sequence, target: RealTarget, p: int) -> RationalInterval | None:
    """Enclosure of ``|P(zeta)|`` excluding zero, or ``None`` if ``P(zeta) = 0``."""
    while True:
        iv = abs(eval_form(coeffs, target, p))
        if iv.lo > 0:
            return iv
        if vanishes_at(coeffs, target):
            return None
        if p >= MAX_PRECISION:
            break
        p *= 2
    raise CertificationFailed(f"could not separate {poly_str(coeffs)} at the target from zero")


# -- best ratio ----------------------------------------------------------------------

@dataclass(frozen=True)
class BestRatio:
    H: int
    n: int
    record: PolynomialRecord
    ratio: RationalInterval
    wstar: tuple[float, float]

    @property
    def wstar_mid(self) -> float:
        return 0.5 * (self.wstar[0] + self.wstar[1])

    def to_json(self) -> dict:
        return {"H": self.H, "n": self.n, "polynomial": self.record.to_json(),
                "ratio": [float(self.ratio.lo), float(self.ratio.hi)],
                "wstar": list(self.wstar)}


def wstar_from_ratio(ratio: RationalInterval, H: int) -> tuple[float, float]:
    if H < 2:
        raise InvalidParameter("w*(zeta, H) needs H >= 2")
    lo, hi = interval_log(ratio)
    logH = math.log(H)
    return (-hi / logH - 1.0, -lo / logH - 1.0)


def _error_bounds(target: RealTarget, n: int, H: int) -> tuple[float, float]:
    z = abs(float(target)) + 1e-300
    powsum = sum(max(z, 1.0) ** i for i in range(n + 1))
    unit = 2.0 ** -60  # a few long-double ulps with margin
    return (8 * (n + 2) * unit * H * powsum + 2.0 ** -1000,
            8 * (n + 2) * unit * n * H * powsum + 2.0 ** -1000)


def _blocks(H: int, workers: int) -> list[tuple[int, int]]:
    k = max(1, min(workers * 4, H))
    edges = [1 + (H * i) // k for i in range(k)] + [H + 1]
    return [(edges[i], edges[i + 1] - 1) for i in range(k) if edges[i] <= edges[i + 1] - 1]


def _ratio_at(c: tuple, target: RealTarget, p: int) -> RationalInterval | None:
    der = _nonzero_enclosure(poly.derivative(c), target, p)
    if der is None:
        return None
    val = abs(eval_form(c, target, p))
    return val / der


def _ratios_equal(a: tuple, b: tuple, target: RealTarget) -> bool | None:
    """Exact test of ``|a/a'| == |b/b'|`` at the target."""
    da, db = poly.derivative(a), poly.derivative(b)
    x = poly.sub(poly.mul(a, db), poly.mul(b, da))
    y = poly.add(poly.mul(a, db), poly.mul(b, da))
    rx, ry = vanishes_at(x, target), vanishes_at(y, target)
    if rx is None or ry is None:
        return None
    return rx or ry


def _pick_best(cands: list[tuple], target: RealTarget) -> tuple[tuple, RationalInterval]:
    """Certified minimum of ``|P/P'|`` among candidates; exact ties go to the smallest (height, coeffs)."""
    p = DEFAULT_PRECISION
    live = []
    for c in cands:
        r = _ratio_at(c, target, p)
        if r is not None:
            live.append((c, r))
    if not live:
        raise CertificationFailed("no candidate has a nonvanishing derivative")
    while True:
        best_hi = min(r.hi for _, r in live)
        live = [(c, r) for c, r in live if r.lo <= best_hi]
        if len(live) == 1:
            return live[0]
        if p >= MAX_PRECISION:
            break
        p = min(2 * p, MAX_PRECISION)
        live = [(c, _ratio_at(c, target, p)) for c, _ in live]
    # overlapping at full precision: only exact ties are acceptable
    live.sort(key=lambda cr: (poly.height(cr[0]), cr[0]))
    head = live[0][0]
    for c, _ in live[1:]:
        if not _ratios_equal(head, c, target):
            raise CertificationFailed("best ratio candidates could not be separated")
    return live[0]


def best_ratio(target: RealTarget, n: int, H: int, cap: int = DEFAULT_CAP, keep: int = 64,
               workers: int | None = None) -> BestRatio:
    """Polynomial minimising ``|P(zeta)/P'(zeta)|`` and the resulting ``w*(zeta, H)``."""
    if n < 1:
        raise InvalidParameter("n must be at least 1")
    if H < 2:
        raise InvalidParameter("w*(zeta, H) needs H >= 2 (log H vanishes at H = 1)")
    if n >= 8:
        raise InvalidParameter("degree above 7 is not supported by the scan")
    if (2 * H + 1) ** n > cap:
        raise BudgetExceeded(f"scan of {(2 * H + 1) ** n} coefficient vectors exceeds the cap {cap}")
    iv = target.enclosure(110)
    hi = float(iv.mid)
    lo = float(iv.mid - Fraction(hi))
    en, ed = _error_bounds(target, n, H)
    workers = workers or kernels.worker_count()
    blocks = _blocks(H, workers)
    while True:
        def run(i_block):
            i, (a, b) = i_block
            return kernels.best_ratio_scan(hi, lo, n, H, a, b, i == 0, keep, en, ed)

        if len(blocks) > 1 and workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(run, enumerate(blocks)))
        else:
            results = [run(x) for x in enumerate(blocks)]
        threshold = math.inf
        cands = []
        for bounds, coeffs, full in results:
            if full and len(bounds):
                threshold = min(threshold, float(bounds[-1]))
            cands.extend(tuple(int(v) for v in row) for row in coeffs)
        cands = sorted(set(representative(c) for c in cands))
        for c in cands:
            if vanishes_at(c, target):
                raise TargetIsAlgebraicOfLowHeight(c)
        best, ratio = _pick_best(cands, target)
        if not math.isfinite(threshold) or ratio.hi < Fraction(threshold):
            break
        if keep >= 1 << 16:
            raise CertificationFailed("the best-ratio scan could not be certified")
        keep *= 4
    rec = polynomial_record(best, target)
    return BestRatio(H, n, rec, ratio, wstar_from_ratio(ratio, H))


def best_ratio_exhaustive(target: RealTarget, n: int, H: int, cap: int = 10 ** 6) -> BestRatio:
    """Reference implementation: every polynomial, certified comparisons."""
    if H < 2:
        raise InvalidParameter("w*(zeta, H) needs H >= 2")
    cands = []
    for rec in enumerate_polynomials(n, H, cap=cap):
        if vanishes_at(rec.coeffs, target):
            raise TargetIsAlgebraicOfLowHeight(rec.coeffs)
        if rec.degree >= 1:
            cands.append(rec.coeffs)
    best, ratio = _pick_best(cands, target)
    return BestRatio(H, n, polynomial_record(best, target), ratio, wstar_from_ratio(ratio, H))


# -- roots -----------------------------------------------------------------------------

@dataclass(frozen=True)
class AlgebraicWitness:
    polynomial: PolynomialRecord
    root: RationalInterval
    distance: RationalInterval
    height: int
    height_exact: bool
    factor: tuple

    def to_json(self) -> dict:
        return {"polynomial": self.polynomial.to_json(), "root": [float(self.root.lo), float(self.root.hi)],
                "distance": [float(self.distance.lo), float(self.distance.hi)], "height": self.height,
                "height_exact": self.height_exact, "factor": list(self.factor)}


def _root_factor(c: tuple, lo: Fraction, hi: Fraction) -> tuple[tuple, bool]:
    """Primitive factor of ``c`` vanishing at the root isolated in ``[lo, hi]``.

    Rational roots are split off exactly; a cofactor of degree at most 3
    without rational roots is irreducible.  Otherwise the result is only a
    multiple of the minimal polynomial.
    """
    f = poly.squarefree_part(c)
    for r in poly.rational_roots(f):
        if lo <= r <= hi:
            return (-r.numerator, r.denominator), True
    rest = f
    for r in poly.rational_roots(f):
        rest, _ = poly.divmod_poly(rest, (-r, 1))
    prim = poly.primitive(rest)
    return representative(prim), poly.degree(prim) <= 3


def nearest_root(P: PolynomialRecord | Sequence[int], target: RealTarget, p: int = DEFAULT_PRECISION,
                 strict: bool = False) -> AlgebraicWitness:
    """Real root of ``P`` closest to the target, with certified distance and height."""
    c = representative(P.coeffs if isinstance(P, PolynomialRecord) else P)
    if poly.degree(c) < 1:
        raise InvalidParameter("P must be nonconstant")
    roots = poly.isolate_real_roots(c)
    if not roots:
        raise NoRealRoot(f"{poly_str(c)} has no real root")
    width = Fraction(1, 1 << p)
    enc = []
    z = target.enclosure(p + 8)
    for lo, hi in roots:
        rlo, rhi = poly.refine_root(c, lo, hi, width)
        root = RationalInterval(rlo, rhi)
        enc.append((root, abs(z - root)))
    # certified minimum; ties toward the smaller root
    best = None
    for root, dist in enc:
        if best is None or dist.hi < best[1].lo:
            best = (root, dist)
    near = [e for e in enc if e[1].lo <= best[1].hi]
    root, dist = min(near, key=lambda e: e[0].lo)
    iso = next((lo, hi) for (lo, hi), e in zip(roots, enc) if e[0] is root)
    factor, exact = _root_factor(c, iso[0], iso[1])
    height = poly.height(factor) if exact else poly.height(c)
    wit = AlgebraicWitness(polynomial_record(c, target), root, dist, height, exact, factor)
    if strict and not exact:
        raise FactorizationUnsupported(wit)
    return wit


# -- the root-proximity bound ----------------------------------------------------------

@dataclass(frozen=True)
class AccVerdict:
    status: str            # "pass", "fail" or "inconclusive"
    distance: tuple
    bound: tuple
    note: str = ""

    @property
    def ok(self) -> bool:
        return self.status != "fail"


def acc_check(P: PolynomialRecord | Sequence[int], target: RealTarget, p: int = DEFAULT_PRECISION) -> AccVerdict:
    """Certify ``|zeta - alpha| <= deg(P) * |P(zeta)/P'(zeta)|`` for the nearest real root ``alpha``.

    The inequality is guaranteed for the nearest complex root.  When a
    non-real root is closer than every real root, a violation by the real
    root is reported as inconclusive.
    """
    c = representative(P.coeffs if isinstance(P, PolynomialRecord) else P)
    d = poly.degree(c)
    der = _nonzero_enclosure(poly.derivative(c), target, p)
    if der is None:
        raise DerivativeVanishes(f"P'(zeta) = 0 for {poly_str(c)}")
    q = p
    while True:
        wit = nearest_root(c, target, q)
        bound = abs(eval_form(c, target, q)) / der * d
        dist = wit.distance
        fb = (float(bound.lo), float(bound.hi))
        fd = (float(dist.lo), float(dist.hi))
        if dist.hi <= bound.lo:
            return AccVerdict("pass", fd, fb)
        if dist.lo > bound.hi:
            complex_roots = [r for r in np.roots(list(reversed([float(x) for x in c]))) if abs(r.imag) > 1e-12]
            zf = float(target)
            if any(abs(zf - r) < float(dist.lo) for r in complex_roots):
                return AccVerdict("inconclusive", fd, fb, "a non-real root is nearer than every real root")
            return AccVerdict("fail", fd, fb)
        if d == 1:
            return AccVerdict("pass", fd, fb, "linear case: equality")
        if q >= MAX_PRECISION:
            return AccVerdict("inconclusive", fd, fb, "distance and bound could not be separated")
        q *= 2
        der = _nonzero_enclosure(poly.derivative(c), target, q)


# -- profiles over H -------------------------------------------------------------------

@dataclass
class WStarRow:
    H: int
    result: BestRatio | None
    error: str | None = None

    @property
    def wstar(self) -> float:
        return self.result.wstar_mid if self.result else math.nan


@dataclass
class WStarProfile:
    target: str
    n: int
    rows: list[WStarRow] = field(default_factory=list)

    @property
    def values(self) -> np.ndarray:
        return np.array([r.wstar for r in self.rows])

    def running_max(self) -> np.ndarray:
        return np.fmax.accumulate(self.values)

    def tail_min(self) -> np.ndarray:
        return np.fmin.accumulate(self.values[::-1])[::-1]

    def to_json(self) -> dict:
        rm, tm = self.running_max(), self.tail_min()
        return {"target": self.target, "n": self.n, "rows": [
            {"H": r.H, "wstar": None if r.result is None else list(r.result.wstar),
             "polynomial": None if r.result is None else r.result.record.to_json(),
             "running_max": float(rm[i]), "tail_min": float(tm[i]), "error": r.error}
            for i, r in enumerate(self.rows)]}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["H", "wstar_lo", "wstar_hi", "polynomial", "running_max", "tail_min", "error"])
        rm, tm = self.running_max().tolist(), self.tail_min().tolist()
        for i, r in enumerate(self.rows):
            if r.result is None:
                w.writerow([r.H, "", "", "", repr(rm[i]), repr(tm[i]), r.error])
            else:
                lo, hi = r.result.wstar
                w.writerow([r.H, repr(lo), repr(hi), poly_str(r.result.record.coeffs), repr(rm[i]), repr(tm[i]), ""])
        return buf.getvalue()


def wstar_profile(target: RealTarget, n: int, H_grid: Sequence[int], cap: int = DEFAULT_CAP) -> WStarProfile:
    """``w*(zeta, H)`` across a strictly increasing grid of heights ``H >= 2``."""
    grid = [int(h) for h in H_grid]
    if not grid:
        raise InvalidParameter("empty H grid")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise InvalidParameter("the H grid must be strictly increasing")
    if grid[0] < 2:
        raise InvalidParameter("the H grid must start at 2 or above")
    prof = WStarProfile(getattr(target, "label", repr(target)), n)
    for H in grid:
        try:
            prof.rows.append(WStarRow(H, best_ratio(target, n, H, cap)))
        except (BudgetExceeded, CertificationFailed) as exc:
            prof.rows.append(WStarRow(H, None, f"{type(exc).__name__}: {exc}"))
    return prof


def height_grid(H_max: int, per_decade: int = 4, start: int = 2) -> list[int]:
    """Roughly log-spaced integer heights from ``start`` to ``H_max``."""
    out = []
    k = 0
    while True:
        h = max(start, round(10 ** (k / per_decade)))
        if h > H_max:
            break
        if not out or h > out[-1]:
            out.append(h)
        k += 1
    if out[-1] != H_max:
        out.append(H_max)
    return out


def dumps(obj) -> str:
    return json.dumps(obj.to_json(), indent=2, sort_keys=True)


def theorem_consistency_report(target: RealTarget, n: int, **kwargs):
    """See :func:`pgnlab.transfer.theorem_consistency_report` (imported lazily to avoid a cycle)."""
    from .transfer import theorem_consistency_report as impl
    return impl(target, n, **kwargs)
