"""Exponent estimates from sampled minima profiles, and the checks relating them.

A profile only ever covers a finite range of Q, so every limit is replaced
by the minimum or maximum over a tail window ``[Q_max**f, Q_max]``.  A least
squares fit of ``|psi|`` against ``1/log Q`` gives an envelope ``C/log Q_max``
that is used as the convergence diagnostic.  Each check returns a
:class:`Verdict` whose status is ``pass``, ``fail`` or ``inconclusive``.
A violated inequality is only reported as ``fail`` when every estimate it
uses has converged.

Exponents may be infinite.  ``math.inf`` is used as a sentinel throughout,
and in a reciprocal product the pairing ``inf * 0`` counts as one.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Sequence

import numpy as np

from .geometry import Family, InvalidParameter
from .minima import DEFAULT_BUDGET, ProfileTable, log_grid, psi_profile
from .realnum import (
    LacunaryTarget,
    RationalInterval,
    RealTarget,
    eval_form,
    parse_target,
    sqrt_interval,
)

INF = math.inf
CONVERGED = 0.05      # envelope at Q_max below which an estimate counts as converged
DEFAULT_TOL = 0.05
DEFAULT_FRACTION = 0.5

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"


class InsufficientData(ValueError):
    pass


# -- limit estimates ------------------------------------------------------------

@dataclass(frozen=True)
class LimitEstimate:
    j: int
    underline: float
    overline: float
    window: tuple[float, float]
    C: float
    envelope: float      # C / log Q_max, the convergence diagnostic
    rows: int
    C_sup: float = 0.0   # max |v| log Q over the window

    @property
    def margin(self) -> float:
        """``C_sup / log Q_lo``: how far an extreme over the window may sit from the limit."""
        return self.C_sup / math.log(self.window[0])

    @property
    def converged(self) -> bool:
        return self.envelope < CONVERGED

    def to_json(self) -> dict:
        return {"j": self.j, "underline": self.underline, "overline": self.overline,
                "window": list(self.window), "C": self.C, "envelope": self.envelope,
                "margin": self.margin, "rows": self.rows, "converged": self.converged}


def fit_envelope(Q: np.ndarray, values: np.ndarray) -> float:
    """Least-squares ``C`` in ``|v| ~ C / log Q`` (a line through the origin)."""
    x = 1.0 / np.log(Q)
    return float(np.dot(np.abs(values), x) / np.dot(x, x))


def estimate_limits(profile: ProfileTable, f: float = DEFAULT_FRACTION, min_rows: int = 5) -> list[LimitEstimate]:
    """Tail-window liminf/limsup of every ``psi_j`` (or ``nu_j``) in a profile."""
    if not 0 < f <= 1:
        raise InvalidParameter("window fraction must lie in (0, 1]")
    rows = profile.ok_rows()
    if not rows:
        raise InsufficientData("profile has no usable rows")
    q_max = float(rows[-1].Q)
    q_lo = q_max ** f
    tail = [r for r in rows if float(r.Q) >= q_lo * (1 - 1e-12)]
    if len(tail) < min_rows:
        raise InsufficientData(f"tail window [{q_lo:.6g}, {q_max:.6g}] has {len(tail)} rows, need {min_rows}")
    Q = np.array([float(r.Q) for r in tail])
    out = []
    for j in range(1, profile.n + 2):
        v = np.array([r.psi(j) for r in tail])
        C = fit_envelope(Q, v)
        out.append(LimitEstimate(j, float(v.min()), float(v.max()), (float(Q[0]), q_max),
                                 C, C / math.log(q_max), len(tail), float(np.max(np.abs(v) * np.log(Q)))))
    return out


# -- the exponent maps ---------------------------------------------------------------

def w_prime_from_psi(v: float, n: int) -> float:
    """``(n+1)/(n(1+v)) - 1``; infinite at ``v = -1``."""
    d = n * (1 + v)
    return INF if d <= 0 else (n + 1) / d - 1


def psi_from_w_prime(w: float, n: int) -> float:
    return -1.0 if w == INF else (n + 1) / (n * (w + 1)) - 1


def w_from_nu(v: float, n: int) -> float:
    """``(n+1)/(n(1/n+v)) - 1``; infinite at ``v = -1/n``."""
    d = 1 + n * v
    return INF if d <= 0 else (n + 1) / d - 1


def nu_from_w(w: float, n: int) -> float:
    return -1.0 / n if w == INF else (n - w) / (n * (w + 1))


def exact_w_prime_from_psi(v: Fraction, n: int) -> Fraction | None:
    """Rational version of :func:`w_prime_from_psi` (``None`` for infinity)."""
    d = n * (1 + v)
    return None if d <= 0 else Fraction(n + 1) / d - 1


def exact_psi_from_w_prime(w: Fraction | None, n: int) -> Fraction:
    return Fraction(-1) if w is None else Fraction(n + 1) / (n * (w + 1)) - 1


def exact_w_from_nu(v: Fraction, n: int) -> Fraction | None:
    d = 1 + n * v
    return None if d <= 0 else Fraction(n + 1) / d - 1


def exact_nu_from_w(w: Fraction | None, n: int) -> Fraction:
    return Fraction(-1, n) if w is None else Fraction(n - w) / (n * (w + 1))


def exponents_from_psi(est: Sequence[LimitEstimate], n: int) -> list[tuple[float, float]]:
    """``(w'_j, w^'_j)`` per j: the liminf gives the ordinary exponent, the limsup the uniform one."""
    return [(w_prime_from_psi(e.underline, n), w_prime_from_psi(e.overline, n)) for e in est]


def exponents_from_nu(est: Sequence[LimitEstimate], n: int) -> list[tuple[float, float]]:
    """``(w_j, w^_j)`` per j from a linear-form profile."""
    return [(w_from_nu(e.underline, n), w_from_nu(e.overline, n)) for e in est]


def _range(fn, v: float, env: float, n: int) -> tuple[float, float]:
    # both maps are decreasing in their argument
    return fn(v + env, n), fn(v - env, n)


# -- verdicts -------------------------------------------------------------------------

@dataclass(frozen=True)
class Verdict:
    name: str
    status: str
    lhs: float
    rhs: float
    tol: float
    note: str = ""

    def to_json(self) -> dict:
        return {"name": self.name, "status": self.status, "lhs": _num(self.lhs),
                "rhs": _num(self.rhs), "tol": self.tol, "note": self.note}

    def line(self) -> str:
        return f"{self.status:>12}  {self.name}: {_fmt(self.lhs)} vs {_fmt(self.rhs)} (tol {self.tol:.3g}) {self.note}".rstrip()


def _num(x: float):
    if x is None:
        return None
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return None
    return x


def _fmt(x: float) -> str:
    return "inf" if x == INF else ("nan" if x is None or math.isnan(x) else f"{x:.6g}")


def at_least(name: str, lhs: float, rhs: float, tol: float, converged: bool, note: str = "",
             slack: float = 0.0) -> Verdict:
    """``lhs >= rhs`` up to ``tol * max(1, |rhs|)``.

    A violation that stays within a further ``slack`` (the estimation
    uncertainty) is inconclusive; beyond it, it fails when ``converged``.
    """
    if math.isnan(lhs) or math.isnan(rhs):
        return Verdict(name, INCONCLUSIVE, lhs, rhs, tol, (note + " missing estimate").strip())
    if lhs == INF or rhs == -INF:
        return Verdict(name, PASS, lhs, rhs, tol, note)
    if rhs == INF:
        return Verdict(name, FAIL if converged else INCONCLUSIVE, lhs, rhs, tol, note)
    margin = tol * max(1.0, abs(rhs))
    if lhs >= rhs - margin:
        return Verdict(name, PASS, lhs, rhs, tol, note)
    if lhs >= rhs - margin - slack:
        return Verdict(name, INCONCLUSIVE, lhs, rhs, tol, (note + " within estimation uncertainty").strip())
    return Verdict(name, FAIL if converged else INCONCLUSIVE, lhs, rhs, tol, note)


def at_most(name: str, lhs: float, rhs: float, tol: float, converged: bool, note: str = "",
            slack: float = 0.0) -> Verdict:
    return replace(at_least(name, -lhs, -rhs, tol, converged, note, slack), lhs=lhs, rhs=rhs)


def reciprocal_product(a: float, b: float) -> float:
    """``a * b`` with ``inf * 0 = 1``."""
    if (a == INF and b == 0) or (a == 0 and b == INF):
        return 1.0
    return a * b


def close_to_one(name: str, value: float, tol: float, converged: bool, note: str = "",
                 bounds: tuple[float, float] | None = None) -> Verdict:
    """``value = 1`` within ``tol``; inconclusive when one lies in the uncertainty range ``bounds``."""
    if math.isnan(value):
        return Verdict(name, INCONCLUSIVE, value, 1.0, tol, (note + " missing estimate").strip())
    if math.isfinite(value) and abs(value - 1.0) <= tol:
        return Verdict(name, PASS, value, 1.0, tol, note)
    if bounds is not None and bounds[0] - tol <= 1.0 <= bounds[1] + tol:
        return Verdict(name, INCONCLUSIVE, value, 1.0, tol, (note + " within estimation uncertainty").strip())
    return Verdict(name, FAIL if converged else INCONCLUSIVE, value, 1.0, tol, note)


def _product_range(a: tuple[float, float], b: tuple[float, float]) -> tuple[float, float]:
    vals = [reciprocal_product(x, y) for x in a for y in b]
    return min(vals), max(vals)


def summarize(verdicts: Sequence[Verdict]) -> str:
    """``pass`` when everything passed, ``fail`` on any failure, else ``inconclusive``."""
    st = {v.status for v in verdicts}
    if FAIL in st:
        return FAIL
    if INCONCLUSIVE in st:
        return INCONCLUSIVE
    return PASS


# -- direct estimates from best simultaneous approximations --------------------------------

@dataclass(frozen=True)
class DirectEstimate:
    """Exponents read off the lattice points ``(x, y)`` found by a primal profile."""
    w_prime: float
    w_hat_prime: float
    points: int
    window: tuple[float, float]

    def to_json(self) -> dict:
        return {"w_prime": _num(self.w_prime), "w_hat_prime": _num(self.w_hat_prime),
                "points": self.points, "window": list(self.window)}


def approximation_error(point: Sequence[int], target: RealTarget, p: int = 160) -> float:
    """``max_t |zeta**t x - y_t|`` for a primal point ``(x, y_1, ..., y_n)``."""
    x, ys = int(point[0]), point[1:]
    err = 0.0
    for t, y in enumerate(ys, start=1):
        iv = abs(eval_form([-int(y)] + [0] * (t - 1) + [x], target, p))
        err = max(err, float(iv.hi))
    return err


def direct_estimates(primal: ProfileTable, target: RealTarget, f: float = DEFAULT_FRACTION) -> DirectEstimate:
    """Limsup of ``-log err / log x`` and liminf of the best error below ``X``.

    Every witness of every row is a candidate approximation.  ``w'`` is the
    largest exponent among points with ``x`` in the tail window.  ``w^'`` is
    the smallest, over tail grid values ``X``, of ``-log e(X) / log X`` where
    ``e(X)`` is the best error among points with ``0 < x <= X``.
    """
    if primal.family is not Family.PRIMAL:
        raise InvalidParameter("direct estimates need a primal profile")
    rows = primal.ok_rows()
    if not rows:
        raise InsufficientData("profile has no usable rows")
    pts = {}
    for r in rows:
        for m in r.records:
            x = abs(m.witness[0])
            if x >= 2:
                sign = 1 if m.witness[0] > 0 else -1
                pts[tuple(sign * c for c in m.witness)] = None
    q_max = float(rows[-1].Q)
    lo = q_max ** f
    errs = sorted((p[0], approximation_error(p, target)) for p in pts)
    if not errs:
        raise InsufficientData("no witness with |x| >= 2")
    w = -INF
    for x, e in errs:
        if x >= lo:
            w = max(w, INF if e == 0 else -math.log(e) / math.log(x))
    w_hat = INF
    for r in rows:
        X = float(r.Q)
        if X < lo:
            continue
        best = min((e for x, e in errs if x <= X), default=None)
        if best is not None:
            w_hat = min(w_hat, INF if best == 0 else -math.log(best) / math.log(X))
    return DirectEstimate(w if w > -INF else math.nan, w_hat if w_hat < INF else math.nan, len(errs), (lo, q_max))


# -- Liouville-type targets ----------------------------------------------------------------------

@dataclass(frozen=True)
class LiouvilleCertificate:
    """Certified lower bounds for the simultaneous exponent along truncations.

    Truncating the series after ``L`` terms gives a rational ``a / b**e_L``.  With
    ``x = b**(n e_L)`` every ``x zeta_L**t`` is an integer and the error is at
    most ``x ((zeta_L + tail)**n - zeta_L**n)``.
    """
    n: int
    levels: tuple[int, ...]
    exponents: tuple[float, ...]
    unbounded: bool

    def to_json(self) -> dict:
        return {"n": self.n, "levels": list(self.levels), "exponents": list(self.exponents),
                "unbounded": self.unbounded}


def liouville_certificate(target: RealTarget, n: int, levels: Sequence[int] = (2, 3, 4, 5)) -> LiouvilleCertificate | None:
    if not isinstance(target, LacunaryTarget):
        return None
    b = target.base
    exps = []
    for L in levels:
        zl = target.partial_sum(L)
        tail = target.tail_bound(L)
        x = b ** (n * target.exponent(L))
        err = x * ((zl + tail) ** n - zl ** n)
        log_err = math.log(err.numerator) - math.log(err.denominator)
        exps.append(-log_err / math.log(x))
    return LiouvilleCertificate(n, tuple(levels), tuple(exps), target.ratio_unbounded)


# -- exponent report ------------------------------------------------------------------------------

@dataclass
class ExponentReport:
    n: int
    target: str
    primal: list[LimitEstimate] = field(default_factory=list)
    dual: list[LimitEstimate] = field(default_factory=list)
    w_prime: list[float] = field(default_factory=list)       # w'_{n,j}
    w_hat_prime: list[float] = field(default_factory=list)   # w^'_{n,j}
    w: list[float] = field(default_factory=list)             # w_{n,j}
    w_hat: list[float] = field(default_factory=list)         # w^_{n,j}
    w_prime_range: list[tuple[float, float]] = field(default_factory=list)
    w_hat_prime_range: list[tuple[float, float]] = field(default_factory=list)
    w_range: list[tuple[float, float]] = field(default_factory=list)
    w_hat_range: list[tuple[float, float]] = field(default_factory=list)
    direct: DirectEstimate | None = None
    certificate: LiouvilleCertificate | None = None
    refused: str | None = None
    floors: dict = field(default_factory=dict)
    verdicts: list[Verdict] = field(default_factory=list)

    def _scalar(self, seq: list[float]) -> float:
        return seq[0] if seq else math.nan

    @property
    def w_prime_n(self) -> float:
        return self._scalar(self.w_prime)

    @property
    def w_hat_prime_n(self) -> float:
        return self._scalar(self.w_hat_prime)

    @property
    def w_n(self) -> float:
        return self._scalar(self.w)

    @property
    def w_hat_n(self) -> float:
        return self._scalar(self.w_hat)

    def primal_converged(self, j: int = 1) -> bool:
        return bool(self.primal) and self.primal[j - 1].converged

    def dual_converged(self, j: int = 1) -> bool:
        return bool(self.dual) and self.dual[j - 1].converged

    @property
    def status(self) -> str:
        return summarize(self.verdicts)

    def to_json(self) -> dict:
        num = lambda seq: [_num(x) for x in seq]
        return {
            "n": self.n, "target": self.target, "refused": self.refused,
            "primal": [e.to_json() for e in self.primal],
            "dual": [e.to_json() for e in self.dual],
            "w_prime": num(self.w_prime), "w_hat_prime": num(self.w_hat_prime),
            "w": num(self.w), "w_hat": num(self.w_hat),
            "direct": self.direct.to_json() if self.direct else None,
            "certificate": self.certificate.to_json() if self.certificate else None,
            "floors": {k: _num(v) for k, v in self.floors.items()},
            "verdicts": [v.to_json() for v in self.verdicts],
            "status": self.status,
        }

    def to_text(self) -> str:
        lines = [f"target {self.target}  n={self.n}"]
        if self.refused:
            lines.append(f"refused: {self.refused}")
        for j in range(len(self.w_prime)):
            lines.append(f"  j={j + 1}  w'={_fmt(self.w_prime[j])}  w^'={_fmt(self.w_hat_prime[j])}"
                         + (f"  w={_fmt(self.w[j])}  w^={_fmt(self.w_hat[j])}" if j < len(self.w) else ""))
        if self.direct:
            lines.append(f"  direct: w'={_fmt(self.direct.w_prime)}  w^'={_fmt(self.direct.w_hat_prime)}"
                         f"  from {self.direct.points} points")
        for k, v in self.floors.items():
            lines.append(f"  {k} = {_fmt(v)}")
        lines.extend(v.line() for v in self.verdicts)
        lines.append(f"overall: {self.status}")
        return "\n".join(lines)


def refusal_reason(target: RealTarget | None, n: int) -> str | None:
    if target is not None and target.algebraic_of_degree_at_most(n):
        return f"{target.label} is algebraic of degree at most {target.degree_bound} <= n = {n}"
    return None


def _target_of(profile: ProfileTable | None, target: RealTarget | None) -> RealTarget | None:
    if target is not None or profile is None:
        return target
    try:
        return parse_target(profile.target)
    except ValueError:
        return None


def refused_verdict(reason: str) -> Verdict:
    return Verdict("exponent estimation", INCONCLUSIVE, math.nan, math.nan, 0.0, f"refused: {reason}")


def exponent_report(primal: ProfileTable | None, dual: ProfileTable | None, target: RealTarget | None = None,
                    f: float = DEFAULT_FRACTION, tol: float = DEFAULT_TOL, force: bool = False) -> ExponentReport:
    """Estimates of all four exponent families plus the checks that need only them."""
    base = primal or dual
    if base is None:
        raise InvalidParameter("need at least one profile")
    n = base.n
    target = _target_of(base, target)
    rep = ExponentReport(n, base.target)
    reason = refusal_reason(target, n)
    if reason and not force:
        rep.refused = reason
        rep.verdicts.append(refused_verdict(reason))
        return rep
    if primal is not None:
        rep.primal = estimate_limits(primal, f)
        rep.w_prime, rep.w_hat_prime = map(list, zip(*exponents_from_psi(rep.primal, n)))
        rep.w_prime_range = [_range(w_prime_from_psi, e.underline, e.margin, n) for e in rep.primal]
        rep.w_hat_prime_range = [_range(w_prime_from_psi, e.overline, e.margin, n) for e in rep.primal]
        if target is not None:
            rep.direct = direct_estimates(primal, target, f)
    if dual is not None:
        rep.dual = estimate_limits(dual, f)
        rep.w, rep.w_hat = map(list, zip(*exponents_from_nu(rep.dual, n)))
        rep.w_range = [_range(w_from_nu, e.underline, e.margin, n) for e in rep.dual]
        rep.w_hat_range = [_range(w_from_nu, e.overline, e.margin, n) for e in rep.dual]
    if target is not None:
        rep.certificate = liouville_certificate(target, n)
        if rep.certificate is not None and rep.certificate.unbounded:
            _apply_certificate(rep)
    if rep.w:
        rep.verdicts.append(at_least("Dirichlet: w_n >= n", rep.w_n, n, tol, rep.dual_converged(),
                                     slack=_half(rep.w_range[0])))
        rep.verdicts.append(at_least("Dirichlet: w^_n >= n", rep.w_hat_n, n, tol, rep.dual_converged(),
                                     slack=_half(rep.w_hat_range[0])))
    if primal is not None and dual is not None:
        rep.verdicts.extend(reciprocal_identity_check(rep, tol))
    if n >= 2 and rep.w and rep.w_prime:
        rep.verdicts.extend(classical_floors(n, rep, tol))
    return rep


def _half(r: tuple[float, float]) -> float:
    lo, hi = r
    if not (math.isfinite(lo) and math.isfinite(hi)):
        return INF
    return 0.5 * (hi - lo)


def _apply_certificate(rep: ExponentReport) -> None:
    """Liouville-type targets: ``w'_{n,1} = w_{n,1} = inf`` and ``w^_{n,n+1} = 0``."""
    n = rep.n
    if rep.w_prime:
        rep.w_prime[0] = INF
        rep.w_prime_range[0] = (INF, INF)
    if rep.w:
        rep.w[0] = INF
        rep.w_range[0] = (INF, INF)
        rep.w_hat[n] = 0.0
        rep.w_hat_range[n] = (0.0, 0.0)


def reciprocal_identity_check(report: ExponentReport, tol: float = DEFAULT_TOL,
                              pairs: Sequence[tuple[int, int]] | None = None) -> list[Verdict]:
    """``w'_{n,n+2-j} w^_{n,j} = 1`` and ``w^'_{n,n+2-j} w_{n,j} = 1`` for each j.

    ``pairs`` overrides the index pairing ``(primal j, dual j)``; any pair not of
    the form ``(n+2-j, j)`` is reported as a failure.
    """
    n = report.n
    m = n + 1
    if not report.w_prime or not report.w:
        return [Verdict("reciprocal identity", INCONCLUSIVE, math.nan, math.nan, tol, "needs both profiles")]
    pairs = list(pairs) if pairs is not None else [(n + 2 - j, j) for j in range(1, m + 1)]
    out = []
    for a, j in pairs:
        tag = f"j={j}"
        if a + j != n + 2:
            out.append(Verdict(f"reciprocal identity {tag}", FAIL, a, j, tol, "index pair does not satisfy a + j = n + 2"))
            continue
        conv = report.primal_converged(a) and report.dual_converged(j)
        p1 = reciprocal_product(report.w_prime[a - 1], report.w_hat[j - 1])
        p2 = reciprocal_product(report.w_hat_prime[a - 1], report.w[j - 1])
        b1 = _product_range(report.w_prime_range[a - 1], report.w_hat_range[j - 1]) if report.w_prime_range else None
        b2 = _product_range(report.w_hat_prime_range[a - 1], report.w_range[j - 1]) if report.w_range else None
        out.append(close_to_one(f"reciprocal identity w'_{a} w^_{j} = 1", p1, tol, conv, bounds=b1))
        out.append(close_to_one(f"reciprocal identity w^'_{a} w_{j} = 1", p2, tol, conv, bounds=b2))
    return out


# -- mixing and Mahler duality ----------------------------------------------------------------------

@dataclass(frozen=True)
class MixingResult:
    j: int
    contacts: int
    spacing: float
    verdict: Verdict


def mixing_check(profile: ProfileTable, f: float = DEFAULT_FRACTION, slack: float = 0.02,
                 min_rows: int = 20, target: RealTarget | None = None, force: bool = False) -> list[Verdict]:
    """Contacts of consecutive minima and the consequence ``liminf psi_{j+1} <= limsup psi_j``.

    A contact at a grid point means ``log lambda_{j+1} - log lambda_j`` is at most
    the local grid spacing in ``log Q``; between samples the minima can move by
    that much, so a crossing cannot be ruled out.  Targets algebraic of degree
    at most n are refused: an integer relation pins some minima apart.
    """
    reason = refusal_reason(_target_of(profile, target), profile.n)
    if reason and not force:
        return [refused_verdict(reason)]
    rows = profile.ok_rows()
    n = profile.n
    if len(rows) < min_rows:
        return [Verdict(f"mixing contacts j={j}", INCONCLUSIVE, len(rows), min_rows, 0.0, "grid too coarse")
                for j in range(1, n + 1)]
    logs = [math.log(float(r.Q)) for r in rows]
    gaps = [b - a for a, b in zip(logs, logs[1:])]
    spacing = [max(gaps[max(i - 1, 0)], gaps[min(i, len(gaps) - 1)]) for i in range(len(rows))]
    out = []
    for j in range(1, n + 1):
        count = sum(1 for i, r in enumerate(rows) if r.log_lambda(j + 1) - r.log_lambda(j) <= spacing[i])
        status = PASS if count else FAIL
        out.append(Verdict(f"mixing contacts j={j}", status, count, 1, 0.0, f"{count} of {len(rows)} rows"))
    try:
        est = estimate_limits(profile, f)
    except InsufficientData as exc:
        out.append(Verdict("mixing consequence", INCONCLUSIVE, math.nan, math.nan, slack, str(exc)))
        return out
    for j in range(1, n + 1):
        lo_next, hi_this = est[j].underline, est[j - 1].overline
        ok = lo_next <= hi_this + slack
        out.append(Verdict(f"mixing consequence liminf psi_{j + 1} <= limsup psi_{j}", PASS if ok else FAIL,
                           lo_next, hi_this, slack))
    return out


@dataclass(frozen=True)
class MahlerSummary:
    j: int
    low: float
    high: float
    slope: float


def mahler_check(primal: ProfileTable, dual: ProfileTable, band: tuple[float, float] = (1e-3, 1e3),
                 max_slope: float = CONVERGED) -> list[Verdict]:
    """``lambda_j(Q) * eta_{n+2-j}(Q)`` stays in a fixed band without a trend in ``log Q``."""
    if primal.target != dual.target:
        return [Verdict("Mahler duality", FAIL, math.nan, math.nan, 0.0,
                        f"targets differ: {primal.target} vs {dual.target}")]
    if primal.n != dual.n:
        return [Verdict("Mahler duality", FAIL, primal.n, dual.n, 0.0, "dimensions differ")]
    n = primal.n
    drows = {r.Q: r for r in dual.ok_rows()}
    pairs = [(r, drows[r.Q]) for r in primal.ok_rows() if r.Q in drows]
    if not pairs:
        return [Verdict("Mahler duality", FAIL, math.nan, math.nan, 0.0, "no common grid points")]
    out = []
    logQ = np.array([math.log(float(p.Q)) for p, _ in pairs])
    for j in range(1, n + 2):
        lp = np.array([p.log_lambda(j) + d.log_lambda(n + 2 - j) for p, d in pairs])
        lo, hi = float(np.exp(lp.min())), float(np.exp(lp.max()))
        slope = float(np.polyfit(logQ, lp, 1)[0]) if len(pairs) >= 3 and np.ptp(logQ) > 0 else 0.0
        in_band = band[0] <= lo and hi <= band[1]
        stable = abs(slope) <= max_slope
        note = f"band [{lo:.4g}, {hi:.4g}], log-slope {slope:.4g}"
        if in_band and (stable or len(pairs) < 3):
            status = PASS
        elif in_band:
            status = INCONCLUSIVE
        else:
            status = FAIL
        out.append(Verdict(f"Mahler duality j={j}", status, lo, hi, max_slope, note))
    return out


# -- the uniform lower bound -----------------------------------------------------------------------

@dataclass(frozen=True)
class UniformBound:
    n: int
    value: RationalInterval       # (n + 1 + sqrt(n^2 + 10n - 7)) / 4
    deviation: RationalInterval   # value - (n/2 + 3/2)
    crossing: RationalInterval    # where the two terms of the max coincide

    @property
    def float_value(self) -> float:
        return float(self.value.mid)

    def to_json(self) -> dict:
        return {"n": self.n, "value": [str(self.value.lo), str(self.value.hi)],
                "value_float": self.float_value, "deviation": float(self.deviation.mid),
                "crossing": [str(self.crossing.lo), str(self.crossing.hi)],
                "wirsing_floor": (self.n + 1) / 2}


def _crossing(n: int, p: int) -> RationalInterval:
    """Root of ``(n-1)(w+1) = 2w(w-1)`` above one, by exact bisection.

    The left term of the max, ``(n+1)/2 / (1 - 2(n-w)/((n-1)(w+1)))``, simplifies
    to ``(n-1)(w+1) / (2(w-1))`` and is decreasing for ``w > 1``; the crossing is
    where it meets ``w``.
    """
    def g(w: Fraction) -> Fraction:
        return 2 * w * (w - 1) - (n - 1) * (w + 1)

    lo, hi = Fraction(1), Fraction(n + 1)
    width = Fraction(1, 1 << p)
    while hi - lo > width:
        mid = (lo + hi) / 2
        if g(mid) > 0:
            hi = mid
        else:
            lo = mid
    return RationalInterval(lo, hi)


def uniform_lower_bound(n: int, p: int = 64) -> UniformBound:
    if n < 2:
        raise InvalidParameter("the uniform lower bound needs n >= 2")
    root = sqrt_interval(n * n + 10 * n - 7, p + 2)
    value = (root + (n + 1)) * Fraction(1, 4)
    return UniformBound(n, value, value - Fraction(n + 3, 2), _crossing(n, p))


# -- classical floors -------------------------------------------------------------------------------

def bugeaud_laurent_floor(w_n: float, w_hat_last: float, n: int) -> float:
    """``max{w/(w-n+1), w^_{n,n+1}}``; the first term is 1 when ``w = inf``."""
    first = 1.0 if w_n == INF else (w_n / (w_n - n + 1) if w_n > n - 1 else INF)
    return max(first, w_hat_last)


def classical_floors(n: int, report: ExponentReport, tol: float = DEFAULT_TOL) -> list[Verdict]:
    """Floors for ``w*_n`` and the checks that involve only profile estimates.

    Fills ``report.floors`` with the Wirsing floor, ``(n+1)/2``, the Bugeaud-Laurent
    floor, the Khinchin floor and ``ceil(n/2)``.
    """
    if n < 2:
        raise InvalidParameter("classical floors need n >= 2")
    out = []
    w, wp = report.w_n, report.w_prime_n
    w_last = report.w[n] if len(report.w) > n else math.nan
    w_hat_last = report.w_hat[n] if len(report.w_hat) > n else math.nan
    fl = report.floors
    fl["wirsing"] = INF if w == INF else (w + 1) / 2
    fl["half_n_plus_one"] = (n + 1) / 2
    fl["uniform"] = uniform_lower_bound(n).float_value
    fl["bugeaud_laurent"] = bugeaud_laurent_floor(w, w_hat_last, n)
    fl["khinchin"] = INF if wp == INF else (n - 1) * wp + n - 2
    fl["davenport_schmidt"] = math.ceil(n / 2)
    fl["nu_last_from_w"] = nu_from_w(w_last, n) if not math.isnan(w_last) else math.nan

    dual_ok = report.dual_converged(1) and report.dual_converged(n + 1)
    out.append(at_least("Wirsing floor >= (n+1)/2", fl["wirsing"], fl["half_n_plus_one"], tol,
                        report.dual_converged(), slack=_half(report.w_range[0]) / 2))
    nu1 = nu_from_w(w, n)
    nu_last = fl["nu_last_from_w"]
    slack = (report.dual[0].margin + 2 / (n - 1) * report.dual[n].margin) if report.dual else 0.0
    out.append(at_most("dual minima: nu_1 <= -2/(n-1) nu_{n+1}", nu1, -2 / (n - 1) * nu_last, tol,
                       dual_ok, slack=slack))
    conv = report.dual_converged() and report.primal_converged()
    out.append(at_least("Khinchin: w_n >= (n-1) w'_n + n - 2", w, fl["khinchin"], tol, conv,
                        slack=_half(report.w_range[0]) + (n - 1) * _half(report.w_prime_range[0])))
    out.append(at_most("uniform simultaneous exponent <= 1/ceil(n/2)", report.w_hat_prime_n,
                       1 / fl["davenport_schmidt"], tol, report.primal_converged(),
                       slack=_half(report.w_hat_prime_range[0])))
    return out


# -- theorem consistency ------------------------------------------------------------------------------

@dataclass(frozen=True)
class WStarEvidence:
    upper: float      # largest w*(zeta, H) over the tail of the height grid
    lower: float      # smallest over the tail
    spread: float
    heights: tuple[int, int]
    converged: bool

    def to_json(self) -> dict:
        return {"upper": _num(self.upper), "lower": _num(self.lower), "spread": self.spread,
                "heights": list(self.heights), "converged": self.converged}


def wstar_evidence(profile, f: float = DEFAULT_FRACTION) -> WStarEvidence | None:
    rows = [r for r in profile.rows if r.result is not None]
    if not rows:
        return None
    h_max = rows[-1].H
    tail = [r for r in rows if r.H >= h_max ** f] or rows[-1:]
    vals = [r.wstar for r in tail]
    spread = max(vals) - min(vals)
    return WStarEvidence(max(vals), min(vals), spread, (tail[0].H, h_max), h_max >= 100 and len(tail) >= 3)


@dataclass
class ConsistencyReport:
    target: str
    n: int
    exponents: ExponentReport
    evidence: WStarEvidence | None
    uniform: UniformBound | None
    verdicts: list[Verdict] = field(default_factory=list)

    @property
    def status(self) -> str:
        return summarize(self.verdicts)

    def to_json(self) -> dict:
        return {"target": self.target, "n": self.n, "exponents": self.exponents.to_json(),
                "wstar_evidence": self.evidence.to_json() if self.evidence else None,
                "uniform_bound": self.uniform.to_json() if self.uniform else None,
                "verdicts": [v.to_json() for v in self.verdicts], "status": self.status}

    def to_text(self) -> str:
        lines = [self.exponents.to_text().rsplit("\n", 1)[0]]
        shown = len(self.exponents.verdicts)
        if self.evidence:
            lines.append(f"w* evidence over H in [{self.evidence.heights[0]}, {self.evidence.heights[1]}]: "
                         f"{_fmt(self.evidence.lower)} .. {_fmt(self.evidence.upper)}")
        lines.extend(v.line() for v in self.verdicts[shown:])
        lines.append(f"overall: {self.status}")
        return "\n".join(lines)


def wstar_verdicts(rep: ExponentReport, ev: WStarEvidence, tol: float = DEFAULT_TOL) -> list[Verdict]:
    """Every inequality between ``w*``/``w^*`` evidence and the profile exponents."""
    n = rep.n
    out = []
    conv_d = rep.dual_converged() and ev.converged
    conv_p = rep.primal_converged() and ev.converged
    s_ev = ev.spread
    w_last = rep.w[n] if len(rep.w) > n else math.nan
    w_last_conv = bool(rep.dual) and rep.dual[n].converged and ev.converged
    out.append(at_least("w*_n >= w_{n,n+1}", ev.upper, w_last, tol, w_last_conv,
                        slack=s_ev + (_half(rep.w_range[n]) if len(rep.w_range) > n else 0)))
    inv_hat = INF if rep.w_hat_prime_n == 0 else 1 / rep.w_hat_prime_n
    out.append(at_least("w*_n >= 1/w^'_n", ev.upper, inv_hat, tol, conv_p,
                        slack=s_ev + _inv_slack(rep.w_hat_prime_n, rep.w_hat_prime_range)))
    inv = 0.0 if rep.w_prime_n == INF else (INF if rep.w_prime_n == 0 else 1 / rep.w_prime_n)
    out.append(at_least("w^*_n >= 1/w'_n", ev.lower, inv, tol, conv_p,
                        slack=s_ev + _inv_slack(rep.w_prime_n, rep.w_prime_range)))
    out.append(at_most("w*_n <= w_n", ev.lower, rep.w_n, tol, conv_d,
                       slack=s_ev + _half(rep.w_range[0]) if rep.w_range else s_ev))
    if n >= 2:
        out.append(at_least("Wirsing: w*_n >= (w_n+1)/2", ev.upper, rep.floors.get("wirsing", math.nan), tol, conv_d,
                            slack=s_ev + _half(rep.w_range[0]) / 2))
        out.append(at_least("w*_n >= U(n)", ev.upper, rep.floors.get("uniform", math.nan), tol, ev.converged, slack=s_ev))
        out.append(at_least("w*_n >= ceil(n/2)", ev.upper, rep.floors.get("davenport_schmidt", math.nan), tol,
                            ev.converged, slack=s_ev))
        out.append(at_least("w^*_n >= Bugeaud-Laurent floor", ev.lower, rep.floors.get("bugeaud_laurent", math.nan),
                            tol, conv_d, slack=s_ev))
    return out


def _inv_slack(v: float, ranges: list[tuple[float, float]]) -> float:
    if not ranges or not math.isfinite(v) or v <= 0:
        return 0.0
    lo, hi = ranges[0]
    if lo <= 0 or not math.isfinite(hi):
        return INF
    return 0.5 * (1 / lo - 1 / hi)


def theorem_consistency_report(target: RealTarget, n: int, q_max: float = 1e5, q_points: int = 41,
                               h_max: int = 1000, tol: float = DEFAULT_TOL, budget: int = DEFAULT_BUDGET,
                               f: float = DEFAULT_FRACTION, force: bool = False, primal: ProfileTable | None = None,
                               dual: ProfileTable | None = None, wstar=None) -> ConsistencyReport:
    """Profiles, ``w*`` evidence and every inequality that ties them together."""
    from .approx import height_grid, wstar_profile

    uniform = uniform_lower_bound(n) if n >= 2 else None
    reason = refusal_reason(target, n)
    if reason and not force:
        rep = ExponentReport(n, target.label, refused=reason, verdicts=[refused_verdict(reason)])
        return ConsistencyReport(target.label, n, rep, None, uniform, list(rep.verdicts))
    grid = log_grid(10.0, q_max, q_points)
    primal = primal or psi_profile(target, n, Family.PRIMAL, grid, budget)
    dual = dual or psi_profile(target, n, Family.LINEAR_FORM, grid, budget)
    rep = exponent_report(primal, dual, target, f, tol, force)
    wstar = wstar or wstar_profile(target, n, height_grid(h_max))
    ev = wstar_evidence(wstar, f)
    verdicts = list(rep.verdicts)
    if ev is None:
        verdicts.append(Verdict("w* evidence", INCONCLUSIVE, math.nan, math.nan, tol, "no w* values"))
    else:
        verdicts.extend(wstar_verdicts(rep, ev, tol))
    if rep.certificate is not None:
        c = rep.certificate
        verdicts.append(Verdict("Liouville certificate: w'_{n,1} unbounded", PASS if c.unbounded else INCONCLUSIVE,
                                c.exponents[-1], c.exponents[0], 0.0,
                                "certified exponents " + ", ".join(f"{e:.3g}" for e in c.exponents)))
    return ConsistencyReport(target.label, n, rep, ev, uniform, verdicts)


def dumps(obj) -> str:
    return json.dumps(obj.to_json(), indent=2, sort_keys=True)
