import csv
import io
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from pgnlab import poly
from pgnlab.approx import (
    BudgetExceeded,
    NoRealRoot,
    TargetIsAlgebraicOfLowHeight,
    acc_check,
    best_ratio,
    best_ratio_exhaustive,
    enumerate_polynomials,
    height_grid,
    nearest_root,
    polynomial_count,
    polynomial_record,
    representative,
    wstar_profile,
)
from pgnlab.geometry import InvalidParameter
from pgnlab.realnum import RationalTarget, cbrt2, golden_ratio, liouville, parse_target, sqrt2


# -- enumeration ------------------------------------------------------------------

@pytest.mark.parametrize("n,H,count", [(1, 1, 4), (1, 2, 12), (2, 1, 13)])
def test_enumeration_examples(n, H, count):
    assert len(list(enumerate_polynomials(n, H))) == count


def test_degree_one_height_one_set():
    got = {r.coeffs for r in enumerate_polynomials(1, 1)}
    assert got == {(1, 0), (0, 1), (1, 1), (-1, 1)}


@pytest.mark.parametrize("n,H", [(1, 5), (2, 3), (3, 2), (4, 1)])
def test_enumeration_count_formula(n, H):
    recs = list(enumerate_polynomials(n, H))
    assert len(recs) == polynomial_count(n, H)
    assert len({r.coeffs for r in recs}) == len(recs)
    assert all(r.coeffs == representative(r.coeffs) and 1 <= r.height <= H for r in recs)


def test_enumeration_cap_and_validation():
    with pytest.raises(BudgetExceeded):
        list(enumerate_polynomials(3, 10, cap=1000))
    with pytest.raises(InvalidParameter):
        list(enumerate_polynomials(0, 3))


def test_record_fields():
    r = polynomial_record((-3, 2), sqrt2())
    assert r.height == 3 and r.degree == 1 and r.primitive
    assert float(r.ratio.mid) == pytest.approx((3 - 2 * math.sqrt(2)) / 2, rel=1e-12)


# -- best ratio ------------------------------------------------------------------

def test_sqrt2_degree_one_height_two():
    # among the 12 candidates of height <= 2 the best is x - 1
    b = best_ratio(sqrt2(), 1, 2)
    assert b.record.coeffs == (-1, 1)
    assert b.wstar_mid == pytest.approx(-math.log2(math.sqrt(2) - 1) - 1, abs=1e-12)


def test_sqrt2_height_three_finds_two_x_minus_three():
    b = best_ratio(sqrt2(), 1, 3)
    assert b.record.coeffs == (-3, 2)
    assert float(b.ratio.mid) == pytest.approx((3 - 2 * math.sqrt(2)) / 2, rel=1e-12)


def test_rational_target_rejected():
    with pytest.raises(TargetIsAlgebraicOfLowHeight):
        best_ratio(RationalTarget(Fraction(1, 2)), 1, 2)
    with pytest.raises(TargetIsAlgebraicOfLowHeight):
        best_ratio(sqrt2(), 2, 3)


def test_height_one_rejected():
    with pytest.raises(InvalidParameter):
        best_ratio(sqrt2(), 2, 1)
    with pytest.raises(InvalidParameter):
        best_ratio_exhaustive(sqrt2(), 2, 1)


@pytest.mark.parametrize("target,n,H", [
    (sqrt2(), 1, 30), (golden_ratio(), 1, 25), (cbrt2(), 2, 9), (liouville(), 2, 8),
    (liouville(), 3, 4), (parse_target("dec:0.12345"), 1, 12), (liouville(), 4, 2),
], ids=lambda v: getattr(v, "label", str(v)))
def test_scan_matches_exhaustive(target, n, H):
    a = best_ratio(target, n, H)
    b = best_ratio_exhaustive(target, n, H)
    assert a.record.coeffs == b.record.coeffs
    assert a.ratio == b.ratio


def test_result_independent_of_workers():
    a = best_ratio(liouville(), 3, 15, workers=1)
    b = best_ratio(liouville(), 3, 15, workers=6)
    assert (a.record.coeffs, a.ratio) == (b.record.coeffs, b.ratio)


def test_min_ratio_nonincreasing_in_h():
    prev = None
    for H in range(2, 40, 3):
        r = best_ratio(cbrt2(), 2, H).ratio
        if prev is not None:
            assert r.lo <= prev.hi
        prev = r


@given(st.lists(st.integers(-9, 9), min_size=2, max_size=4).filter(lambda c: poly.degree(c) >= 1))
@settings(max_examples=60, deadline=None)
def test_sign_flip_invariance(c):
    t = cbrt2()
    a, b = polynomial_record(c, t), polynomial_record([-x for x in c], t)
    assert a == b


def test_scan_budget():
    with pytest.raises(BudgetExceeded):
        best_ratio(cbrt2(), 3, 1000, cap=10 ** 6)


# -- roots -------------------------------------------------------------------------

def test_nearest_root_examples():
    w = nearest_root((-2, 0, 1), RationalTarget(Fraction(3, 2)))
    assert w.root.lo ** 2 <= 2 <= w.root.hi ** 2
    assert float(w.distance.mid) == pytest.approx(1.5 - math.sqrt(2), rel=1e-12)
    w = nearest_root((-3, 2), sqrt2())
    assert w.root.contains(Fraction(3, 2)) and w.root.width <= Fraction(1, 2 ** 90)
    assert w.height == 3 and w.height_exact
    with pytest.raises(NoRealRoot):
        nearest_root((1, 0, 1), sqrt2())


def test_height_from_factor():
    # (x - 2)(x**2 - 2) has the root sqrt 2 with minimal polynomial x**2 - 2
    c = poly.mul((-2, 1), (-2, 0, 1))
    w = nearest_root(c, RationalTarget(Fraction(7, 5)))
    assert w.factor == (-2, 0, 1) and w.height == 2 and w.height_exact
    w = nearest_root(c, RationalTarget(Fraction(19, 10)))
    assert w.factor == (-2, 1) and w.height == 2


def test_acc_examples():
    v = acc_check((-2, 0, 1), RationalTarget(Fraction(3, 2)))
    assert v.status == "pass"
    assert v.bound[1] == pytest.approx(2 * 0.25 / 3, rel=1e-12)


def test_acc_linear_equality():
    for c in ((-3, 2), (5, 7), (-1, 1)):
        v = acc_check(c, cbrt2())
        assert v.status == "pass"
        assert v.distance[0] == pytest.approx(v.bound[0], rel=1e-10)


def test_root_next_to_excluded_endpoint():
    # 13x**2 - x: the bisection puts the root 0 at the open end of the interval for 1/13
    roots = poly.isolate_real_roots((0, -1, 13))
    assert roots[0] == (0, 0)
    lo, hi = roots[1]
    assert lo < Fraction(1, 13) <= hi and poly.sign_at((0, -1, 13), lo) != 0
    v = acc_check((0, -1, 13), RationalTarget(Fraction(47469, 50000)))
    assert v.status == "pass"
    assert v.distance[0] == pytest.approx(47469 / 50000 - 1 / 13)


def test_acc_no_real_root():
    with pytest.raises(NoRealRoot):
        acc_check((1, 1, 1), RationalTarget(Fraction(1, 3)))


def test_acc_randomized_suite():
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
        v = acc_check(c, RationalTarget(zeta))
        checked += 1
        failures += v.status == "fail"
    assert failures == 0


# -- profiles over H ---------------------------------------------------------------------

def test_height_grid():
    g = height_grid(1000)
    assert g[0] == 2 and g[-1] == 1000
    assert all(b > a for a, b in zip(g, g[1:]))


def test_wstar_profile_validation():
    with pytest.raises(InvalidParameter):
        wstar_profile(sqrt2(), 1, [2, 5, 5])
    with pytest.raises(InvalidParameter):
        wstar_profile(sqrt2(), 1, [1, 5])
    with pytest.raises(InvalidParameter):
        wstar_profile(sqrt2(), 1, [])


def test_sqrt2_tail_near_one():
    prof = wstar_profile(sqrt2(), 1, [2, 5, 10, 100, 1000, 10 ** 4])
    tail = prof.values[-3:]
    assert all(0.8 <= v <= 1.3 for v in tail)
    assert list(prof.running_max()) == sorted(prof.running_max())


def test_liouville_spikes():
    prof = wstar_profile(liouville(), 1, [9, 10, 11, 99, 100, 101])
    # 0.11 = 11/100 is within 10**-6 of the target, so H = 100 jumps
    v = dict(zip([r.H for r in prof.rows], prof.values))
    assert v[100] > 1.5 * v[99]
    assert v[100] > 1.9


def test_profile_csv_and_json():
    prof = wstar_profile(cbrt2(), 2, [2, 3, 5])
    lines = prof.to_csv().splitlines()
    assert lines[0].startswith("H,wstar_lo")
    assert len(lines) == 4
    assert prof.to_json()["rows"][0]["H"] == 2
    rows = list(csv.DictReader(io.StringIO(prof.to_csv())))
    assert [float(r["running_max"]) for r in rows] == prof.running_max().tolist()
    assert [float(r["tail_min"]) for r in rows] == prof.tail_min().tolist()
