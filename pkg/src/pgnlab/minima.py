"""Successive minima of (body, lattice) pairs and sampled profiles over Q.

Two enumeration routes share one certified selection step:

* :func:`successive_minima` conditions the basis with exact LLL and streams
  candidates from the compiled kernel.  The kernel keeps a running
  minimum-gauge basis and drops a point only when it is the heaviest member
  of a circuit whose other members it has already emitted.  Near-ties are
  dropped only when they are exact: the forms that attain the gauge are
  rational on the lattice, and their integer images compare equal or worse.
  Along the innermost line the kernel jumps over plateaus where forms
  constant on the line dominate.  Breaking ties by a small perturbation
  turns every drop into a strict circuit maximum, so by the cycle property
  of matroids the emitted set still contains a minimum basis.
* :func:`enumerate_candidates` scans the explicit coordinate windows and is
  kept as the transparent reference.

Selection is greedy by certified gauge with exact rank checks.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .geometry import (
    BodySpec,
    Family,
    Gauge,
    InvalidParameter,
    LatticeKind,
    LatticeTag,
    _combine,
    exact_rows,
    gauge,
    gauge_ordering_exact,
    make_body,
    scaled_basis,
)
from .lll import lll_reduce
from .realnum import (
    DEFAULT_P_MAX,
    Ordering,
    PolyExpr,
    RationalInterval,
    RealTarget,
    certified_compare,
    eval_form,
    interval_log,
    log_fraction,
    to_fraction,
)

DEFAULT_BUDGET = 100_000_000
KERNEL_MARGIN = 1e-6     # float gauges from the kernel are accurate to ~1e-12 relative
WINDOW_MARGIN = 1e-4


class BudgetExceeded(RuntimeError):
    pass


class CertificationFailed(AssertionError):
    pass


def canonical(point: Sequence[int]) -> tuple[int, ...]:
    """Representative of ``{v, -v}`` whose first nonzero coordinate is positive."""
    point = tuple(int(c) for c in point)
    for c in point:
        if c:
            return point if c > 0 else tuple(-v for v in point)
    return point


@dataclass(frozen=True)
class MinimaRecord:
    j: int
    lam: RationalInterval
    psi: tuple[float, float]
    witness: tuple[int, ...]
    exact: Fraction | None = None

    @property
    def lam_float(self) -> float:
        return float(self.lam.mid)

    @property
    def psi_mid(self) -> float:
        return 0.5 * (self.psi[0] + self.psi[1])

    def to_json(self) -> dict:
        return {
            "j": self.j,
            "lambda_lo": str(self.lam.lo),
            "lambda_hi": str(self.lam.hi),
            "psi_lo": repr(self.psi[0]),
            "psi_hi": repr(self.psi[1]),
            "witness": list(self.witness),
        }


def psi_enclosure(lam: RationalInterval, Q: Fraction) -> tuple[float, float]:
    lo, hi = interval_log(lam)
    lq = log_fraction(Q)
    lq_lo, lq_hi = math.nextafter(lq, 0.0), math.nextafter(lq, math.inf)
    cands = [lo / lq_lo, lo / lq_hi, hi / lq_lo, hi / lq_hi]
    return math.nextafter(min(cands), -math.inf), math.nextafter(max(cands), math.inf)


# -- exact rank bookkeeping -------------------------------------------------

class _Echelon:
    """Incremental row echelon form over Q for independence tests."""

    def __init__(self):
        self.rows: list[tuple[int, list[Fraction]]] = []

    def reduce(self, v: Sequence[int]) -> list[Fraction]:
        w = [Fraction(x) for x in v]
        for piv, row in self.rows:
            if w[piv]:
                f = w[piv] / row[piv]
                w = [a - f * b for a, b in zip(w, row)]
        return w

    def independent(self, v: Sequence[int]) -> bool:
        return any(self.reduce(v))

    def add(self, v: Sequence[int]) -> None:
        w = self.reduce(v)
        piv = next(i for i, x in enumerate(w) if x)
        self.rows.append((piv, w))


def integer_rank(vectors: Iterable[Sequence[int]]) -> int:
    ech = _Echelon()
    for v in vectors:
        if ech.independent(v):
            ech.add(v)
    return len(ech.rows)


# -- certified comparison of gauges -----------------------------------------

def compare_gauges(a: Gauge, b: Gauge, p_max: int = DEFAULT_P_MAX) -> Ordering:
    exact = gauge_ordering_exact(a, b)
    if exact is not None:
        return {-1: Ordering.LESS, 0: Ordering.EQUAL, 1: Ordering.GREATER}[exact]
    ia, ib = a.relative_enclosure(80), b.relative_enclosure(80)
    if ia.hi < ib.lo:
        return Ordering.LESS
    if ia.lo > ib.hi:
        return Ordering.GREATER
    return certified_compare(a, b, p_max=p_max, p_start=128)


def _certified_greedy(body: BodySpec, lattice: LatticeKind, cands: list[tuple[float, tuple]],
                      count: int, margin: float, p_max: int) -> list[MinimaRecord]:
    forms = body.effective_forms(lattice)
    cands = sorted(cands)
    ech = _Echelon()
    records: list[MinimaRecord] = []
    remaining = cands
    for j in range(1, count + 1):
        group: list[tuple] = []
        w0 = None
        keep = []
        for w, pt in remaining:
            if w0 is not None and w > w0 * (1.0 + margin) + 1e-300:
                keep.append((w, pt))
                continue
            if not ech.independent(pt):
                continue
            if w0 is None:
                w0 = w
            group.append(pt)
            keep.append((w, pt))
        remaining = keep
        if not group:
            raise CertificationFailed(f"candidate set has rank {j - 1} < {count}")
        best = group[0]
        g_best = gauge(body, best, forms=forms)
        for pt in group[1:]:
            g = gauge(body, pt, forms=forms)
            order = compare_gauges(g, g_best, p_max)
            if order is Ordering.LESS or (order in (Ordering.EQUAL, Ordering.UNDECIDED) and pt < best):
                best, g_best = pt, g
        ech.add(best)
        remaining = [(w, pt) for w, pt in remaining if pt != best]
        lam = g_best.relative_enclosure(80)
        records.append(MinimaRecord(j, lam, psi_enclosure(lam, body.Q), best, g_best.exact()))
    for a, b in zip(records, records[1:]):
        if b.lam.hi < a.lam.lo:
            raise CertificationFailed("minima out of order")
    return records


# -- route 1: LLL + streaming kernel ----------------------------------------

def _integer_image(body: BodySpec, lattice: LatticeKind, bits: int) -> list[list[int]]:
    """Columns ``round(2**bits * form_i(e_k)/bound_i)``."""
    forms = body.effective_forms(lattice)
    m = body.n + 1
    cols = []
    for k in range(m):
        col = []
        for f in forms:
            coeff = f.coeffs[k]
            if not coeff:
                col.append(0)
                continue
            iv = eval_form(coeff, body.target, bits + 16) * f.bound.enclosure(bits + 16).reciprocal()
            col.append(int(math.floor(iv.mid * (1 << bits) + Fraction(1, 2))))
        cols.append(col)
    return cols


def reduced_basis(body: BodySpec, lattice: LatticeKind | None = None) -> list[list[int]]:
    """Unimodular ``U`` (rows) whose columns form an LLL-reduced basis for the gauge."""
    lattice = lattice or body.default_lattice()
    span = abs(float(body.Q)) * (1.0 + abs(float(body.target))) ** (body.n + 1)
    bits = 48 + 2 * max(1, math.ceil(math.log2(span)))
    cols = _integer_image(body, lattice, bits)
    _, U = lll_reduce(cols)
    return U


def kernel_candidates(body: BodySpec, lattice: LatticeKind | None = None,
                      budget: int = DEFAULT_BUDGET) -> list[tuple[float, tuple]]:
    lattice = lattice or body.default_lattice()
    if not body.bounded:
        raise InvalidParameter("successive minima need a bounded body")
    U = reduced_basis(body, lattice)
    B = np.ascontiguousarray(scaled_basis(body, U, lattice), dtype=float)
    Z, groups = exact_rows(body, U, lattice)
    coords, weights, nodes, status = kernels.enumerate_min_basis(B, 1e-9, int(budget), Z, groups)
    if status == kernels.BUDGET_EXCEEDED:
        raise BudgetExceeded(f"enumeration visited more than {budget} nodes")
    if status == kernels.OUT_OF_MEMORY:
        raise MemoryError("enumeration buffer")
    Um = [[int(v) for v in row] for row in U]
    out = {}
    for u, w in zip(coords.tolist(), weights.tolist()):
        z = canonical([sum(Um[i][k] * u[k] for k in range(len(u))) for i in range(len(Um))])
        if z not in out or w < out[z]:
            out[z] = w
    return [(w, z) for z, w in out.items()]


def successive_minima(body: BodySpec, lattice: LatticeKind | None = None, count: int | None = None,
                      budget: int = DEFAULT_BUDGET, p_max: int = DEFAULT_P_MAX) -> list[MinimaRecord]:
    """The first ``count`` successive minima with certified values and witnesses."""
    lattice = lattice or body.default_lattice()
    count = body.n + 1 if count is None else count
    if not 1 <= count <= body.n + 1:
        raise InvalidParameter("count must lie in 1..n+1")
    cands = kernel_candidates(body, lattice, budget)
    return _certified_greedy(body, lattice, cands, count, KERNEL_MARGIN, p_max)


# -- route 2: explicit windows ------------------------------------------------

def _powers(target: RealTarget, n: int) -> np.ndarray:
    z = approx_longdouble(target)
    return np.array([z ** t for t in range(n + 1)], dtype=np.longdouble)


def approx_longdouble(target: RealTarget) -> np.longdouble:
    iv = target.enclosure(80)
    hi = float(iv.mid)
    lo = float(iv.mid - Fraction(hi))
    return np.longdouble(hi) + np.longdouble(lo)


def window_size(body: BodySpec, lattice: LatticeKind, cap: float) -> int:
    n, Q = body.n, float(body.Q)
    if lattice.tag is LatticeTag.LAMBDA:
        xs = 2 * math.floor(cap * Q) + 1
        return xs * (2 * (math.ceil(cap * Q ** (-1.0 / n)) + 1) + 1) ** n
    ys = (2 * math.floor(cap * Q ** (1.0 / n)) + 1) ** n
    return ys * (2 * (math.ceil(cap / Q) + 1) + 1)


def enumerate_candidates(body: BodySpec, lattice: LatticeKind | None = None, cap=1,
                         budget: int = DEFAULT_BUDGET) -> list[tuple[int, ...]]:
    """All nonzero lattice points with gauge at most ``cap``, one per sign pair.

    Windows.  For the primal lattice a point in ``cap*K`` has ``|x| <= cap*Q``
    and ``|zeta**t x - y_t| <= cap*Q**(-1/n)``, hence
    ``|y_t - round(zeta**t x)| <= cap*Q**(-1/n) + 1/2``, which the slack
    ``ceil(cap*Q**(-1/n)) + 1`` covers.  For the integer lattice and the
    linear-form body, ``|y_t| <= cap*Q**(1/n)`` and
    ``|x + sum zeta**t y_t| <= cap/Q`` give
    ``|x - round(-sum zeta**t y_t)| <= cap/Q + 1/2`` in the same way.  The
    compressed body is contained in the linear-form body, so its points are
    found by the same window and filtered.
    """
    lattice = lattice or body.default_lattice()
    cap_f = float(cap)
    if cap_f <= 0:
        raise InvalidParameter("cap must be positive")
    size = window_size(body, lattice, cap_f)
    if size > budget:
        raise BudgetExceeded(f"window of {size} points exceeds the budget {budget}")
    n, Q = body.n, float(body.Q)
    zp = _powers(body.target, n)
    if lattice.tag is LatticeTag.LAMBDA and body.family is Family.PRIMAL:
        X = np.arange(1, math.floor(cap_f * Q) + 1, dtype=np.int64)  # x = 0 gives no point inside
        d = math.ceil(cap_f * Q ** (-1.0 / n)) + 1
        deltas = np.arange(-d, d + 1, dtype=np.int64)
        if len(X) == 0:
            return []
        centers = [np.rint(X.astype(np.longdouble) * zp[t]).astype(np.int64) for t in range(1, n + 1)]
        grids = np.meshgrid(np.arange(len(X)), *([deltas] * n), indexing="ij")
        idx = grids[0].ravel()
        pts = np.empty((len(idx), n + 1), dtype=np.int64)
        pts[:, 0] = X[idx]
        for t in range(1, n + 1):
            pts[:, t] = centers[t - 1][idx] + grids[t].ravel()
        # x = 0 leaves only |y_t| <= cap*Q**(-1/n), which is empty unless that exceeds 1
        if cap_f * Q ** (-1.0 / n) >= 1:
            extra = _zero_x_points(n, math.floor(cap_f * Q ** (-1.0 / n)))
            pts = np.concatenate([pts, extra]) if len(extra) else pts
    elif lattice.tag is LatticeTag.LAMBDA_PLUS and body.family in (Family.LINEAR_FORM, Family.COMPRESSED):
        Y = math.floor(cap_f * Q ** (1.0 / n) * (1 + 1e-12))
        d = math.ceil(cap_f / Q) + 1
        axes = [np.arange(-Y, Y + 1, dtype=np.int64)] * n
        grids = np.meshgrid(*axes, indexing="ij")
        Ys = np.stack([g.ravel() for g in grids], axis=1) if n else np.zeros((1, 0), dtype=np.int64)
        s = (Ys.astype(np.longdouble) * zp[1:]).sum(axis=1)
        center = np.rint(-s).astype(np.int64)
        deltas = np.arange(-d, d + 1, dtype=np.int64)
        k = len(deltas)
        pts = np.empty((len(Ys) * k, n + 1), dtype=np.int64)
        pts[:, 0] = (center[:, None] + deltas[None, :]).ravel()
        pts[:, 1:] = np.repeat(Ys, k, axis=0)
    else:
        raise InvalidParameter("no enumeration window for this body and lattice")
    pts = pts[np.any(pts != 0, axis=1)]
    g, err = _float_gauges(body, lattice, pts)
    inside = g <= cap_f + err
    pts, g, err = pts[inside], g[inside], err[inside]
    out = set()
    forms = body.effective_forms(lattice)
    cap_q = to_fraction(cap)
    for p, gv, e in zip(pts.tolist(), g.tolist(), err.tolist()):
        c = canonical(p)
        if c in out:
            continue
        if gv < cap_f - e:
            out.add(c)
            continue
        order = certified_compare(gauge(body, c, forms=forms), cap_q, p_max=512)
        if order is not Ordering.GREATER:
            out.add(c)
    return sorted(out)


def _zero_x_points(n: int, r: int) -> np.ndarray:
    axes = [np.arange(-r, r + 1, dtype=np.int64)] * n
    grids = np.meshgrid(*axes, indexing="ij")
    Ys = np.stack([g.ravel() for g in grids], axis=1)
    Ys = Ys[np.any(Ys != 0, axis=1)]
    return np.concatenate([np.zeros((len(Ys), 1), dtype=np.int64), Ys], axis=1)


def _float_gauges(body: BodySpec, lattice: LatticeKind, pts: np.ndarray):
    """Long-double gauges with a conservative absolute error bound."""
    eps = float(np.finfo(np.longdouble).eps)
    zp = _powers(body.target, body.n)
    P = pts.astype(np.longdouble)
    g = np.zeros(len(pts), dtype=np.longdouble)
    err = np.zeros(len(pts), dtype=np.longdouble)
    for f in body.effective_forms(lattice):
        val = np.zeros(len(pts), dtype=np.longdouble)
        mag = np.zeros(len(pts), dtype=np.longdouble)
        for k, coeff in enumerate(f.coeffs):
            if not coeff:
                continue
            c = sum(np.longdouble(float(Fraction(a))) * zp[i] for i, a in enumerate(coeff))
            val += c * P[:, k]
            mag += np.abs(c * P[:, k])
        inv = np.longdouble(1.0) / np.longdouble(float(f.bound))
        term = np.abs(val) * inv
        e = (8 * (body.n + 2) * eps * mag + 1e-300) * inv + term * 1e-15
        replace = term > g
        g = np.where(replace, term, g)
        err = np.maximum(err, e)
    return g.astype(float), err.astype(float) + 1e-300


def successive_minima_windowed(body: BodySpec, lattice: LatticeKind | None = None, count: int | None = None,
                               budget: int = DEFAULT_BUDGET, p_max: int = DEFAULT_P_MAX) -> list[MinimaRecord]:
    """Reference route: cap starts at 1 and doubles until ``count`` independent points appear."""
    lattice = lattice or body.default_lattice()
    count = body.n + 1 if count is None else count
    cap = Fraction(1)
    while True:
        pts = enumerate_candidates(body, lattice, cap, budget)
        if integer_rank(pts) >= count:
            break
        cap *= 2
    if not pts:
        raise CertificationFailed("no candidates")
    arr = np.array(pts, dtype=np.int64)
    g, _ = _float_gauges(body, lattice, arr)
    cands = list(zip(g.tolist(), pts))
    return _certified_greedy(body, lattice, cands, count, WINDOW_MARGIN, p_max)


# -- profiles -------------------------------------------------------------------

def grid_point(k: int, per_decade: int = 10) -> Fraction:
    """``10**(k/per_decade)`` rounded to six decimals (exact for whole decades)."""
    if k % per_decade == 0:
        return Fraction(10) ** (k // per_decade)
    return Fraction(f"{10 ** (k / per_decade):.6f}")


def default_grid(k_lo: int = 10, k_hi: int = 60, per_decade: int = 10) -> list[Fraction]:
    return [grid_point(k, per_decade) for k in range(k_lo, k_hi + 1)]


def log_grid(q_min: float, q_max: float, points: int) -> list[Fraction]:
    if points < 1 or q_min <= 1 or q_max < q_min:
        raise InvalidParameter("invalid Q grid")
    if points == 1:
        return [Fraction(f"{q_min:.6f}")]
    a, b = math.log10(q_min), math.log10(q_max)
    out = []
    for i in range(points):
        e = a + (b - a) * i / (points - 1)
        r = round(e)
        out.append(Fraction(10) ** r if abs(e - r) < 1e-12 and r >= 0 else Fraction(f"{10 ** e:.6f}"))
    return sorted(set(out))


@dataclass
class ProfileRow:
    Q: Fraction
    records: list[MinimaRecord] = field(default_factory=list)
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None and bool(self.records)

    def psi(self, j: int) -> float:
        return self.records[j - 1].psi_mid

    def log_lambda(self, j: int) -> float:
        return math.log(self.records[j - 1].lam_float)


@dataclass
class ProfileTable:
    family: Family
    n: int
    target: str
    rows: list[ProfileRow]
    grid_spec: str = ""

    def ok_rows(self) -> list[ProfileRow]:
        return [r for r in self.rows if r.ok]

    def series(self, j: int) -> tuple[np.ndarray, np.ndarray]:
        rows = self.ok_rows()
        return (np.array([float(r.Q) for r in rows]), np.array([r.psi(j) for r in rows]))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["family", "n", "target", "Q", "j", "lambda", "lambda_lo", "lambda_hi",
                    "psi", "psi_lo", "psi_hi", "witness", "error"])
        for row in self.rows:
            if not row.ok:
                w.writerow([self.family.value, self.n, self.target, _fmt_q(row.Q), "", "", "", "",
                            "", "", "", "", row.error or "empty"])
                continue
            for r in row.records:
                w.writerow([self.family.value, self.n, self.target, _fmt_q(row.Q), r.j,
                            f"{r.lam_float:.17g}", f"{float(r.lam.lo):.17g}", f"{float(r.lam.hi):.17g}",
                            f"{r.psi_mid:.17g}", f"{r.psi[0]:.17g}", f"{r.psi[1]:.17g}",
                            " ".join(map(str, r.witness)), ""])
        return buf.getvalue()

    def to_json(self) -> dict:
        return {
            "family": self.family.value,
            "n": self.n,
            "target": self.target,
            "grid": self.grid_spec,
            "rows": [
                {"Q": str(r.Q), "error": r.error, "minima": [m.to_json() for m in r.records]}
                for r in self.rows
            ],
        }

    @classmethod
    def from_csv(cls, text: str) -> "ProfileTable":
        reader = csv.DictReader(io.StringIO(text))
        rows: dict[Fraction, ProfileRow] = {}
        meta = None
        for rec in reader:
            meta = meta or (rec["family"], int(rec["n"]), rec["target"])
            Q = Fraction(rec["Q"])
            row = rows.setdefault(Q, ProfileRow(Q))
            if rec.get("error"):
                row.error = rec["error"]
                continue
            lam = RationalInterval(Fraction(rec["lambda_lo"]), Fraction(rec["lambda_hi"]))
            psi = (float(rec["psi_lo"]), float(rec["psi_hi"]))
            wit = tuple(int(v) for v in rec["witness"].split())
            row.records.append(MinimaRecord(int(rec["j"]), lam, psi, wit))
        if meta is None:
            raise ValueError("empty profile table")
        fam = Family.parse(meta[0])
        return cls(fam, meta[1], meta[2], [rows[q] for q in sorted(rows)])


def _fmt_q(Q: Fraction) -> str:
    return str(Q.numerator) if Q.denominator == 1 else f"{float(Q):.6f}"


def _profile_row(target: RealTarget, n: int, family: Family, Q: Fraction, budget: int) -> ProfileRow:
    body = make_body(family, n, Q, target)
    try:
        return ProfileRow(Q, successive_minima(body, budget=budget))
    except BudgetExceeded as exc:
        return ProfileRow(Q, error=f"BudgetExceeded: {exc}")


def psi_profile(target: RealTarget, n: int, family: Family | str = Family.PRIMAL,
                grid: Sequence | None = None, budget: int = DEFAULT_BUDGET,
                workers: int | None = None) -> ProfileTable:
    """Sample all ``n+1`` minima over a grid of Q values (rows run concurrently)."""
    if isinstance(family, str):
        family = Family.parse(family)
    if family not in (Family.PRIMAL, Family.LINEAR_FORM):
        raise InvalidParameter("profiles are defined for the primal and linear-form bodies")
    grid = default_grid() if grid is None else [to_fraction(q) for q in grid]
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise InvalidParameter("grid must be strictly increasing")
    if any(q <= 1 for q in grid):
        raise InvalidParameter("grid values must exceed 1")
    workers = workers or kernels.worker_count()
    if workers == 1 or len(grid) == 1:
        rows = [_profile_row(target, n, family, Q, budget) for Q in grid]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda Q: _profile_row(target, n, family, Q, budget), grid))
    spec = f"{_fmt_q(grid[0])}..{_fmt_q(grid[-1])} ({len(grid)} points)"
    return ProfileTable(family, n, target.label, sorted(rows, key=lambda r: r.Q), spec)


# -- Minkowski's second theorem -------------------------------------------------

@dataclass(frozen=True)
class MinkowskiVerdict:
    Q: Fraction
    product: RationalInterval
    lower: Fraction
    upper: Fraction
    log_sample: float      # |sum_j nu_j(Q)| * log Q = |log prod eta_j|

    @property
    def ok(self) -> bool:
        return self.lower <= self.product.lo and self.product.hi <= self.upper


def minkowski_check(row: ProfileRow | Sequence[MinimaRecord], n: int, Q=None) -> MinkowskiVerdict:
    """Certify ``1/(n+1)! <= prod_j eta_j <= 1`` for a linear-form row.

    The body has volume ``2**(n+1)`` and the lattice determinant one, so the
    bounds are those of Minkowski's second theorem.
    """
    if isinstance(row, ProfileRow):
        Q, records = row.Q, row.records
    else:
        records = list(row)
    if len(records) != n + 1:
        raise CertificationFailed(f"row has {len(records)} minima, expected {n + 1}")
    prod = RationalInterval(1)
    for r in records:
        prod = (prod * r.lam).round_out(200)
    lower, upper = Fraction(1, math.factorial(n + 1)), Fraction(1)
    sample = abs(math.log(float(prod.mid))) if prod.mid > 0 else math.inf
    verdict = MinkowskiVerdict(to_fraction(Q) if Q is not None else Fraction(0), prod, lower, upper, sample)
    if not verdict.ok:
        raise CertificationFailed(
            f"product of minima {float(prod.lo):.6g}..{float(prod.hi):.6g} outside [{lower}, {upper}]")
    return verdict


# -- the range of psi ---------------------------------------------------------------

@dataclass(frozen=True)
class PsiRangeViolation:
    Q: Fraction
    j: int
    lam: RationalInterval
    side: str             # "below -1" or "above 1/n"


def psi_range_violations(table: ProfileTable) -> list[PsiRangeViolation]:
    """Rows whose certified minima leave the range of the body's log-minima.

    The primal body keeps ``-1 <= psi_j <= 1/n``; the linear-form body keeps
    ``-1/n <= nu_j <= 1``.  Compared exactly (``psi < -1`` is ``lambda * Q < 1``,
    ``psi > 1/n`` is ``lambda**n > Q`` and so on); only certain violations count.
    """
    n = table.n
    primal = table.family is Family.PRIMAL
    low, high = ("below -1", "above 1/n") if primal else ("below -1/n", "above 1")
    out = []
    for row in table.ok_rows():
        Q = row.Q
        for r in row.records:
            lo, hi = r.lam.lo, r.lam.hi
            if (hi * Q < 1) if primal else (hi ** n * Q < 1):
                out.append(PsiRangeViolation(Q, r.j, r.lam, low))
            elif (lo ** n > Q) if primal else (lo > Q):
                out.append(PsiRangeViolation(Q, r.j, r.lam, high))
    return out
