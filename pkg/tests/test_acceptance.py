"""Acceptance battery: one printed PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -v``; the lines appear even when
output capture is on.
"""

import math
import random
import time
from fractions import Fraction
from functools import cache

import mpmath
import numpy as np

from oracles import DPS, naive_minima
from pgnlab import poly
from pgnlab.approx import acc_check, best_ratio, best_ratio_exhaustive, enumerate_polynomials, height_grid, wstar_profile
from pgnlab.geometry import Family, make_body
from pgnlab.minima import log_grid, minkowski_check, psi_profile, successive_minima
from pgnlab.realnum import RationalTarget, cbrt2, golden_ratio, liouville, sqrt2
from pgnlab.transfer import (
    FAIL,
    direct_estimates,
    estimate_limits,
    exponent_report,
    fit_envelope,
    mixing_check,
    refusal_reason,
    theorem_consistency_report,
    uniform_lower_bound,
    w_from_nu,
)
from pgnlab.volume import (
    compressed_volume,
    lemma_sweep,
    monte_carlo_volume,
    slab_cube_volume,
    solve_compression,
)

TARGETS = (golden_ratio(), sqrt2(), cbrt2(), liouville())


def report(capsys, tag, ok, detail):
    with capsys.disabled():
        print(f"\n[acceptance {tag}] {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


@cache
def profile(target, n, family, q_max=1e5, points=41):
    return psi_profile(target, n, family, log_grid(10, q_max, points))


# -- 1 -------------------------------------------------------------------------------

def test_minkowski_product_bounds(capsys):
    start = time.time()
    rows = missing = 0
    worst = (math.inf, -math.inf)
    for target in TARGETS:
        for n in (1, 2, 3):
            table = profile(target, n, Family.LINEAR_FORM)
            missing += len(table.rows) - len(table.ok_rows())
            for row in table.ok_rows():
                v = minkowski_check(row, n)      # raises CertificationFailed outside the bounds
                rows += 1
                ratio = float(v.product.lo / v.lower)
                worst = (min(worst[0], ratio), max(worst[1], float(v.product.hi)))
    elapsed = time.time() - start
    ok = missing == 0 and rows == 4 * 3 * 41 and elapsed <= 600
    report(capsys, 1, ok, f"{rows} rows certified, {missing} missing, min prod/(1/(n+1)!) = {worst[0]:.4g}, "
                          f"max prod = {worst[1]:.4g}, {elapsed:.1f}s (limit 600s)")


# -- 2 -------------------------------------------------------------------------------

def test_engine_matches_brute_force(capsys):
    rows = agree = 0
    bad = []
    for target in TARGETS:
        for n in (1, 2):
            for family in ("Primal", "LinearForm"):
                for Q in log_grid(10, 1000, 5):
                    lams, _ = naive_minima(target, n, Q, family)
                    recs = successive_minima(make_body(family, n, Q, target))
                    with mpmath.workdps(DPS):
                        same = len(recs) == len(lams) and all(
                            mpmath.mpf(r.lam.lo.numerator) / r.lam.lo.denominator <= lam
                            <= mpmath.mpf(r.lam.hi.numerator) / r.lam.hi.denominator
                            for r, lam in zip(recs, lams))
                    rows += 1
                    agree += same
                    if not same:
                        bad.append((target.label, n, family, float(Q)))
    report(capsys, 2, agree == rows, f"{agree}/{rows} rows: every certified lambda encloses the brute-force value"
                                     + (f"; mismatches {bad}" if bad else ""))


# -- 3 -------------------------------------------------------------------------------

def test_golden_ratio_transference(capsys):
    phi = golden_ratio()
    P = profile(phi, 1, Family.PRIMAL, 1e6, 61)
    D = profile(phi, 1, Family.LINEAR_FORM, 1e6, 61)
    Q, _ = P.series(1)
    head, tail = Q < math.sqrt(Q[-1]), Q >= math.sqrt(Q[-1])
    fits = []
    for j in (1, 2):
        _, v = P.series(j)
        scaled = np.abs(v) * np.log(Q)
        fits.append((fit_envelope(Q, v), scaled[head].max(), scaled[tail].max()))
    bounded = all(math.isfinite(C) and t <= 2 * max(h, 1e-9) for C, h, t in fits)

    psi_low = estimate_limits(P)[0].underline
    w1 = direct_estimates(P, phi).w_prime
    product = (1 + w1) * (1 + psi_low)
    rep = exponent_report(P, D, phi)
    recip = rep.w_prime[1] * rep.w_hat[0]
    ok = bounded and abs(product / 2 - 1) <= 0.05 and abs(recip - 1) <= 0.10
    report(capsys, 3, ok, "C/log Q fits " + ", ".join(f"C_{j}={C:.3g} (sup {h:.3g} -> {t:.3g})"
                                                      for j, (C, h, t) in enumerate(fits, 1))
           + f"; (1+w'_1)(1+liminf psi_1) = {product:.4f} vs 2 (5%); w'_(1,2) w^_(1,1) = {recip:.4f} vs 1 (10%)")


# -- 4 -------------------------------------------------------------------------------

def test_mixing(capsys):
    checked, refused, failed = [], [], []
    for target in TARGETS:
        for n in (1, 2, 3):
            if refusal_reason(target, n):
                refused.append(f"{target.label} n={n}")
                continue
            for family in (Family.PRIMAL, Family.LINEAR_FORM):
                verdicts = mixing_check(profile(target, n, family), target=target)
                checked.append(f"{target.label} n={n} {family.value}")
                failed += [f"{target.label} n={n} {family.value}: {v.name}" for v in verdicts if v.status != "pass"]
    report(capsys, 4, not failed and len(checked) == 14,
           f"{len(checked)} profiles with contacts for every adjacent pair and liminf psi_(j+1) <= limsup psi_j + 0.02; "
           f"excluded as algebraic of degree <= n: {', '.join(refused)}" + (f"; failures {failed}" if failed else ""))


# -- 5 -------------------------------------------------------------------------------

def _random_instance(rng, n):
    b = [Fraction(rng.choice((-1, 1)) * rng.randint(1, 1000), rng.randint(1, 100)) for _ in range(n)]
    total = sum(abs(x) for x in b)
    return b, total * Fraction(rng.randint(1, 999), 1000)


def test_volume_kernel_against_monte_carlo(capsys):
    rng = random.Random(5)
    agree, worst = 0, 0.0
    for n in (2, 3, 4):
        for k in range(50):
            b, rho = _random_instance(rng, n)
            exact = slab_cube_volume(b, rho)
            est = monte_carlo_volume(b, rho, samples=10 ** 6, seed=1000 * n + k)
            agree += est.agrees(exact)
            if est.sigma:
                worst = max(worst, abs(est.value - float(exact)) / est.sigma)
    analytic = (slab_cube_volume((1, 2), 1) == 2
                and all(slab_cube_volume((1,) * n, n) == 2 ** n for n in (2, 3, 4))
                and all(slab_cube_volume((1, 2, 3)[:n], 0) == 0 for n in (2, 3)))
    report(capsys, 5, agree == 150 and analytic,
           f"{agree}/150 instances within 4 sigma (worst {worst:.2f} sigma); analytic cases {'exact' if analytic else 'WRONG'}")


# -- 6 -------------------------------------------------------------------------------

def test_compression(capsys):
    Qs = log_grid(10, 1e5, 9)
    rhos = [Fraction(1, 2 ** k) for k in range(16)]
    notes, ok = [], True
    for target, n in ((golden_ratio(), 2), (cbrt2(), 2), (cbrt2(), 3), (liouville(), 3), (liouville(), 4)):
        sols = [solve_compression(n, Q, target) for Q in Qs]
        same = all(s.c == sols[0].c for s in sols)
        resid = max(max(abs(s.residual.lo), abs(s.residual.hi)) for s in sols)
        slope = float(np.polyfit(np.log([float(q) for q in Qs]), [math.log(float(s.c.mid)) for s in sols], 1)[0])
        vol_ok = all(compressed_volume(n, s.Q, target, s.c).overlaps(
            compressed_volume(n, sols[0].Q, target, sols[0].c)) for s in sols)
        sweep = lemma_sweep(n, target, Qs, rhos)
        band = float(sweep.E / sweep.F)
        B = float(sweep.B)
        row_ok = same and vol_ok and resid < Fraction(1, 2 ** 50) and math.isfinite(band) and B > 0 and abs(slope) < 1e-12
        ok &= row_ok
        notes.append(f"{target.label} n={n}: c={float(sols[0].c.mid):.6g} fixed={same} residual<2^-50={resid < Fraction(1, 2 ** 50)} "
                     f"Q-exponent of c={slope:.1e} E/F={band:.4g} B={B:.4g}")
    report(capsys, 6, ok, "; ".join(notes))


# -- 7 -------------------------------------------------------------------------------

def test_root_proximity(capsys):
    rng = random.Random(20240601)
    checked = failures = 0
    while checked < 1000:
        deg = rng.randint(1, 5)
        c = [rng.randint(-50, 50) for _ in range(deg + 1)]
        if c[-1] == 0:
            continue
        zeta = Fraction(rng.randint(0, 10 ** 6), 10 ** 6)
        if poly.evaluate(c, zeta) == 0 or poly.evaluate(poly.derivative(c), zeta) == 0:
            continue
        if not poly.isolate_real_roots(poly.trim(c)):
            continue
        checked += 1
        failures += acc_check(c, RationalTarget(zeta)).status == "fail"
    linear = [acc_check(c, t) for c in ((-3, 2), (5, 7), (-1, 1), (11, -4)) for t in (sqrt2(), cbrt2(), liouville())]
    digits = min(-math.log10(abs(v.distance[0] / v.bound[0] - 1)) if v.distance[0] != v.bound[0] else 17
                 for v in linear)
    report(capsys, 7, failures == 0 and digits >= 10,
           f"{failures} certified violations in {checked} cases; linear equality to {digits:.1f} significant digits")


# -- 8 -------------------------------------------------------------------------------

def test_sqrt2_height_two_value(capsys):
    exhaustive = best_ratio_exhaustive(sqrt2(), 1, 2)
    scan = best_ratio(sqrt2(), 1, 2)
    candidates = len(list(enumerate_polynomials(1, 2)))
    value = exhaustive.wstar_mid
    ok = candidates == 12 and scan.record.coeffs == exhaustive.record.coeffs and abs(value - 2.543) <= 0.001
    report(capsys, "8a", ok,
           f"w*(sqrt2, H=2) over all {candidates} candidates = {value:.4f} at P = {exhaustive.record.coeffs} "
           f"(scan agrees: {scan.record.coeffs == exhaustive.record.coeffs}); required 2.543 +/- 0.001")


def test_sqrt2_tail(capsys):
    prof = wstar_profile(sqrt2(), 1, height_grid(10 ** 4))
    tail = [(r.H, r.wstar) for r in prof.rows if r.H >= 100]
    ok = all(0.8 <= v <= 1.3 for _, v in tail)
    report(capsys, "8b", ok, f"w*(sqrt2, H) for H in [100, 10^4]: {min(v for _, v in tail):.4f} .. "
                             f"{max(v for _, v in tail):.4f} over {len(tail)} heights, required within [0.8, 1.3]")


# -- 9 -------------------------------------------------------------------------------

def test_uniform_bound_table(capsys):
    u2, u3 = uniform_lower_bound(2), uniform_lower_bound(3)
    with mpmath.workdps(30):
        e2 = abs(mpmath.mpf(u2.value.mid.numerator) / u2.value.mid.denominator - (3 + mpmath.sqrt(17)) / 4)
        e3 = abs(mpmath.mpf(u3.value.mid.numerator) / u3.value.mid.denominator - (1 + mpmath.sqrt(2)))
    table = [uniform_lower_bound(n) for n in range(2, 51)]
    dev = [float(u.deviation.mid) for u in table]
    shrinking = all(abs(b) < abs(a) for a, b in zip(dev, dev[1:]))
    above = all(u.value.lo >= Fraction(u.n + 1, 2) for u in table)
    ok = e2 < 1e-12 and e3 < 1e-12 and shrinking and abs(dev[-1]) < 0.1 and above
    report(capsys, 9, ok, f"U(2) err {float(e2):.1e}, U(3) err {float(e3):.1e}; U(n) - (n/2+3/2) from {dev[0]:.4f} "
                          f"to {dev[-1]:.4f}, magnitude strictly decreasing: {shrinking}; U(n) >= (n+1)/2: {above}")


# -- 10 ------------------------------------------------------------------------------

def test_theorem_consistency(capsys):
    notes, hard = [], []
    for target in (sqrt2(), cbrt2()):
        rep = theorem_consistency_report(target, 2, q_max=1e5, h_max=1000)
        counts = {s: sum(v.status == s for v in rep.verdicts) for s in ("pass", "inconclusive", "fail")}
        hard += [f"{target.label}: {v.name}" for v in rep.verdicts if v.status == FAIL]
        notes.append(f"{target.label}: {counts['pass']} pass, {counts['inconclusive']} inconclusive, {counts['fail']} fail"
                     + (" (refused)" if rep.exponents.refused else ""))
    liou = theorem_consistency_report(liouville(), 2, q_max=1e5, h_max=1000)
    ex = liou.exponents
    raw_hat_last = w_from_nu(ex.dual[2].overline, 2)
    hard += [f"liouville: {v.name}" for v in liou.verdicts if v.status == FAIL]
    regime = (ex.certificate is not None and ex.certificate.unbounded and ex.w_hat[2] == 0
              and ex.floors["bugeaud_laurent"] == 1)
    notes.append(f"liouville: w^_(2,3) = {ex.w_hat[2]:g} from certified exponents {', '.join(f'{e:.3g}' for e in ex.certificate.exponents)} (profile estimate alone {raw_hat_last:.3g}), "
                 f"Bugeaud-Laurent floor = {ex.floors['bugeaud_laurent']:g}")
    report(capsys, 10, not hard and regime, "; ".join(notes) + (f"; hard failures {hard}" if hard else ""))
