"""Exact volumes of a cube cut by a symmetric slab, and the compression factor.

In cube coordinates the compressed linear-form body is
``[-1, 1] x {u in [-1, 1]^n : |b.u| <= c}`` with ``b_t = t * zeta**(t-1)``,
so everything reduces to ``V(b, rho) = vol{u in [-1,1]^n : |b.u| <= rho}``.

Irrational coefficients arrive as rational intervals.  ``V`` is nondecreasing
in ``rho`` and nonincreasing in every ``|b_t|`` (Anderson's inequality: the
other coordinates contribute a symmetric log-concave density), so evaluating
the exact formula at the two extreme corners gives a certified enclosure.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

import numpy as np

from .geometry import InvalidParameter
from .realnum import PowerOfQ, RationalInterval, RealTarget, power_enclosures, to_fraction

Number = Union[Fraction, RationalInterval]

DEFAULT_PRECISION = 128


class DegenerateNormal(ValueError):
    """The slab normal is identically zero."""


def _as_interval(x) -> RationalInterval:
    if isinstance(x, RationalInterval):
        return x
    return RationalInterval.point(to_fraction(x))


@dataclass(frozen=True)
class SlabCubeInstance:
    b: tuple
    rho: object

    def __post_init__(self):
        object.__setattr__(self, "b", tuple(self.b))
        if not self.b:
            raise InvalidParameter("the slab normal needs at least one coordinate")
        if _as_interval(self.rho).lo < 0:
            raise InvalidParameter("rho must be nonnegative")

    @property
    def n(self) -> int:
        return len(self.b)

    @property
    def exact(self) -> bool:
        return all(_as_interval(x).is_point for x in (*self.b, self.rho))


def _subset_sums(a: Sequence[Fraction]) -> list[tuple[int, Fraction]]:
    """Pairs ``(sign, 2*sum_S a)`` over all subsets ``S``."""
    out = [(1, Fraction(0))]
    for x in a:
        out += [(-s, acc + 2 * x) for s, acc in out]
    return out


def _cdf_numerator(terms, shift: Fraction, power: int) -> Fraction:
    total = Fraction(0)
    for sign, acc in terms:
        d = shift - acc
        if d > 0:
            total += sign * d ** power
    return total


def _volume_exact(a: Sequence[Fraction], rho: Fraction) -> Fraction:
    """``V`` for nonnegative exact ``a``; zero entries contribute a factor 2 each."""
    live = [x for x in a if x != 0]
    factor = 2 ** (len(a) - len(live))
    m = len(live)
    if m == 0:
        raise DegenerateNormal("all slab coefficients vanish")
    A = sum(live)
    if rho <= 0:
        return Fraction(0)
    if rho >= A:
        return Fraction(factor * 2 ** m)
    terms = _subset_sums(live)
    denom = math.factorial(m) * math.prod(live)
    up = _cdf_numerator(terms, rho + A, m)
    down = _cdf_numerator(terms, A - rho, m)
    return factor * (up - down) / denom


def slab_cube_volume(inst: SlabCubeInstance | Sequence, rho=None) -> Number:
    """``vol{u in [-1,1]^n : |b.u| <= rho}``.

    Exact rational inputs give a :class:`~fractions.Fraction`; interval inputs
    give a :class:`RationalInterval` enclosure.
    """
    if not isinstance(inst, SlabCubeInstance):
        inst = SlabCubeInstance(tuple(inst), rho)
    mags = [abs(_as_interval(x)) for x in inst.b]
    if all(m.hi == 0 for m in mags):
        raise DegenerateNormal("all slab coefficients vanish")
    r = _as_interval(inst.rho)
    if inst.exact:
        return _volume_exact([m.lo for m in mags], r.lo)
    if all(m.lo == 0 for m in mags):
        # the normal may vanish: only the trivial bounds survive on the upper side
        lo = _volume_exact([m.hi for m in mags], r.lo)
        return RationalInterval(lo, Fraction(2 ** len(mags)))
    lo = _volume_exact([m.hi for m in mags], r.lo)
    hi = _volume_exact([m.lo for m in mags], r.hi)
    return RationalInterval(lo, hi)


def slab_density_at_zero(b: Sequence) -> Fraction:
    """``dV/drho`` at ``rho = 0`` for exact ``b``: twice the central section measure over ``|b|``."""
    a = [abs(to_fraction(x)) for x in b]
    live = [x for x in a if x != 0]
    if not live:
        raise DegenerateNormal("all slab coefficients vanish")
    factor = 2 ** (len(a) - len(live))
    m = len(live)
    A = sum(live)
    terms = _subset_sums(live)
    density = _cdf_numerator(terms, A, m - 1) / (math.factorial(m - 1) * math.prod(live))
    return 2 * factor * density


# -- the compressed body -------------------------------------------------------

def slab_normal(n: int, target: RealTarget, p: int = DEFAULT_PRECISION) -> list[Number]:
    """``b_t = t * zeta**(t-1)`` for ``t = 1..n`` (exact for rational targets)."""
    if n < 1:
        raise InvalidParameter("n must be at least 1")
    pw = power_enclosures(target, n - 1, p) if n > 1 else [RationalInterval.point(1)]
    out: list[Number] = []
    for t in range(1, n + 1):
        iv = pw[t - 1] * t
        out.append(iv.lo if iv.is_point else iv)
    return out


def compressed_volume(n: int, Q, target: RealTarget, c, p: int = DEFAULT_PRECISION) -> Number:
    """Volume of the linear-form body cut by the derivative slab of half-width ``c*Q**(1/n)``."""
    if to_fraction(Q) <= 1:
        raise InvalidParameter("Q must exceed 1")
    if _as_interval(c).lo < 0:
        raise InvalidParameter("c must be nonnegative")
    if _as_interval(c).hi == 0:
        return Fraction(0)
    v = slab_cube_volume(SlabCubeInstance(tuple(slab_normal(n, target, p)), c))
    return 2 * v if isinstance(v, Fraction) else v * 2


def compression_target(n: int) -> Fraction:
    return Fraction(2 ** (n + 1), 2 * math.factorial(n + 1))


@dataclass(frozen=True)
class CompressionSolution:
    n: int
    Q: Fraction
    c: RationalInterval
    target_volume: Fraction
    residual: RationalInterval

    def __float__(self) -> float:
        return float(self.c.mid)

    def to_json(self) -> dict:
        return {"n": self.n, "Q": str(self.Q), "c_lo": str(self.c.lo), "c_hi": str(self.c.hi),
                "c": float(self.c.mid), "target_volume": str(self.target_volume),
                "residual": [float(self.residual.lo), float(self.residual.hi)]}


def solve_compression(n: int, Q, target: RealTarget, rel_width: Fraction = Fraction(1, 2 ** 53),
                      p: int = DEFAULT_PRECISION) -> CompressionSolution:
    """Bisect for the unique ``c`` with compressed volume ``2**(n+1)/(2(n+1)!)``.

    The equation does not involve ``Q`` once written in cube coordinates, so
    the answer is the same for every ``Q``.
    """
    Qf = to_fraction(Q)
    if Qf <= 1:
        raise InvalidParameter("Q must exceed 1")
    goal = compression_target(n)
    while True:
        b = slab_normal(n, target, p)
        inst_b = tuple(b)
        half_goal = goal / 2
        hi = sum((_as_interval(x).__abs__().hi for x in inst_b), Fraction(0))
        lo = Fraction(0)
        stuck = False
        while hi - lo > rel_width * hi:
            mid = (lo + hi) / 2
            v = _as_interval(slab_cube_volume(SlabCubeInstance(inst_b, mid)))
            if v.hi < half_goal:
                lo = mid
            elif v.lo > half_goal:
                hi = mid
            elif v.is_point:
                lo = hi = mid
            else:
                stuck = True
                break
        if not stuck:
            break
        p *= 2
        if p > 1 << 14:
            raise ArithmeticError("could not resolve the compression factor")
    c = RationalInterval(lo, hi)
    vol = _as_interval(compressed_volume(n, Qf, target, c, p))
    return CompressionSolution(n, Qf, c, goal, vol - goal)


# -- the volume bound over a (Q, R) sweep --------------------------------------

@dataclass(frozen=True)
class LemmaRatio:
    Q: Fraction
    R: object
    rho: RationalInterval
    volume: RationalInterval
    ratio: RationalInterval
    saturated: bool

    def row(self) -> list:
        return [str(self.Q), float(self.R), float(self.rho.mid), float(self.volume.lo),
                float(self.volume.hi), float(self.ratio.mid)]


def _rho_of(n: int, Q: Fraction, R, p: int) -> RationalInterval:
    if isinstance(R, PowerOfQ):
        if R.Q == Q and R.exponent == Fraction(1, n):
            return RationalInterval.point(R.scale)
        return R.enclosure(p) * PowerOfQ(Q, Fraction(-1, n)).enclosure(p)
    return PowerOfQ(Q, Fraction(-1, n), to_fraction(R)).enclosure(p)


def lemma_ratio(n: int, Q, R, target: RealTarget, p: int = DEFAULT_PRECISION) -> LemmaRatio:
    """Normalised volume ``vol * Q**(1/n) / R`` of the box cut by ``|P'(zeta)| <= R``.

    ``R`` is a rational or a :class:`PowerOfQ`.  Because the normalisation
    equals ``vol / rho`` the ratio depends on ``Q`` and ``R`` only through
    ``rho = R * Q**(-1/n)``.
    """
    if n < 2:
        raise InvalidParameter("the volume bound concerns n >= 2")
    Qf = to_fraction(Q)
    if Qf <= 1:
        raise InvalidParameter("Q must exceed 1")
    rho = _rho_of(n, Qf, R, p)
    if rho.lo <= 0:
        raise InvalidParameter("R must be positive")
    b = slab_normal(n, target, p)
    total = sum((_as_interval(x).__abs__().lo for x in b), Fraction(0))
    saturated = rho.lo >= total
    vol = _as_interval(slab_cube_volume(SlabCubeInstance(tuple(b), rho))) * 2
    return LemmaRatio(Qf, R, rho, vol, vol / rho, saturated)


@dataclass(frozen=True)
class LemmaSweep:
    n: int
    rows: tuple

    @property
    def unsaturated(self) -> list[LemmaRatio]:
        return [r for r in self.rows if not r.saturated]

    @property
    def E(self) -> Fraction:
        return max(r.ratio.hi for r in self.unsaturated)

    @property
    def F(self) -> Fraction:
        return min(r.ratio.lo for r in self.unsaturated)

    @property
    def B(self) -> Fraction:
        return compression_target(self.n) / self.E

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["Q", "R", "rho", "vol_lo", "vol_hi", "ratio"])
        for r in self.rows:
            w.writerow([r.Q, repr(float(r.R)), repr(float(r.rho.mid)), repr(float(r.volume.lo)),
                        repr(float(r.volume.hi)), repr(float(r.ratio.mid))])
        return buf.getvalue()


def lemma_sweep(n: int, target: RealTarget, Qs: Iterable, rhos: Iterable) -> LemmaSweep:
    """Ratios over a grid with ``R = rho * Q**(1/n)``."""
    rows = []
    rhos = [to_fraction(r) for r in rhos]
    for Q in Qs:
        Qf = to_fraction(Q)
        for rho in rhos:
            rows.append(lemma_ratio(n, Qf, PowerOfQ(Qf, Fraction(1, n), rho), target))
    if not any(not r.saturated for r in rows):
        raise InvalidParameter("every sweep point saturates the slab")
    return LemmaSweep(n, tuple(rows))


def ratio_limit_at_zero(n: int, target: RealTarget) -> Fraction:
    """Limit of the normalised ratio as ``rho -> 0`` (rational targets only)."""
    b = slab_normal(n, target)
    if not all(isinstance(x, Fraction) for x in b):
        raise InvalidParameter("the closed form needs exact coefficients")
    return 2 * slab_density_at_zero(b)


# -- Monte Carlo oracle --------------------------------------------------------

@dataclass(frozen=True)
class MonteCarloEstimate:
    value: float
    sigma: float
    samples: int

    def agrees(self, exact, k: float = 4.0) -> bool:
        lo, hi = _as_interval(exact).to_float_bounds()
        if self.sigma == 0.0:
            return lo - 1e-12 <= self.value <= hi + 1e-12
        return lo - k * self.sigma <= self.value <= hi + k * self.sigma


def monte_carlo_volume(inst: SlabCubeInstance | Sequence, rho=None, samples: int = 1_000_000,
                       seed: int = 0, batch: int = 200_000) -> MonteCarloEstimate:
    """Hit-or-miss estimate with its binomial standard error; deterministic in ``seed``."""
    if not isinstance(inst, SlabCubeInstance):
        inst = SlabCubeInstance(tuple(inst), rho)
    if samples < 10_000:
        raise InvalidParameter("use at least 10^4 samples")
    b = np.array([float(_as_interval(x).mid) for x in inst.b])
    r = float(_as_interval(inst.rho).mid)
    n = len(b)
    streams = np.random.SeedSequence(seed).spawn((samples + batch - 1) // batch)
    hits = 0
    left = samples
    for ss in streams:
        k = min(batch, left)
        u = np.random.default_rng(ss).uniform(-1.0, 1.0, size=(k, n))
        hits += int(np.count_nonzero(np.abs(u @ b) <= r))
        left -= k
    frac = hits / samples
    scale = 2.0 ** n
    rho_iv = _as_interval(inst.rho)
    if rho_iv.hi == 0 or rho_iv.lo >= sum((abs(_as_interval(x)).hi for x in inst.b), Fraction(0)):
        return MonteCarloEstimate(scale * frac, 0.0, samples)
    # Agresti-Coull keeps the error honest when every sample lands on one side
    p = (hits + 2) / (samples + 4)
    return MonteCarloEstimate(scale * frac, scale * math.sqrt(p * (1 - p) / (samples + 4)), samples)
