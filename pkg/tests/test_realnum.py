from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from pgnlab import poly
from pgnlab.realnum import (
    AlgebraicTarget,
    LacunaryTarget,
    Lazy,
    NonConvergent,
    Ordering,
    PolyExpr,
    RationalInterval,
    RationalTarget,
    TargetParseError,
    approximate,
    cbrt2,
    certified_compare,
    eval_form,
    golden_ratio,
    liouville,
    parse_target,
    sqrt2,
)

SQRT2_DIGITS = Fraction("1.41421356237309504880168872420969807856967187537694")


def targets():
    return [golden_ratio(), sqrt2(), cbrt2(), liouville(), RationalTarget(Fraction(1, 3)),
            parse_target("dec:0.12345"), parse_target("lac:3,square")]


# -- RationalInterval ----------------------------------------------------------

def test_interval_rejects_inverted_bounds():
    with pytest.raises(ValueError):
        RationalInterval(2, 1)


def test_interval_is_immutable():
    iv = RationalInterval(0, 1)
    with pytest.raises(AttributeError):
        iv.lo = Fraction(1, 2)


small = st.fractions(min_value=-50, max_value=50, max_denominator=40)


@st.composite
def intervals(draw):
    a, b = draw(small), draw(small)
    return RationalInterval(min(a, b), max(a, b))


@given(intervals(), intervals(), st.floats(0, 1), st.floats(0, 1))
def test_interval_arithmetic_contains_images(a, b, s, t):
    x = a.lo + (a.hi - a.lo) * Fraction(s)
    y = b.lo + (b.hi - b.lo) * Fraction(t)
    assert (a + b).contains(x + y)
    assert (a - b).contains(x - y)
    assert (a * b).contains(x * y)
    assert abs(a).contains(abs(x))
    assert (a ** 3).contains(x ** 3)
    if not b.contains(0):
        assert (a / b).contains(x / y)


@given(intervals(), st.integers(1, 40))
def test_round_out_widens(a, bits):
    r = a.round_out(bits)
    assert r.lo <= a.lo and a.hi <= r.hi
    assert r.width <= a.width + Fraction(2, 1 << bits)


def test_reciprocal_of_interval_straddling_zero():
    with pytest.raises(ZeroDivisionError):
        RationalInterval(-1, 1).reciprocal()


# -- approximate ----------------------------------------------------------------

def test_rational_is_exact():
    iv = approximate(RationalTarget(Fraction(1, 3)), 10)
    assert iv.lo == iv.hi == Fraction(1, 3)


def test_sqrt2_enclosure():
    iv = approximate(sqrt2(), 20)
    assert iv.width <= Fraction(1, 2 ** 20)
    assert iv.contains(SQRT2_DIGITS)
    assert iv.lo ** 2 <= 2 <= iv.hi ** 2


def test_liouville_enclosure_digits():
    iv = approximate(liouville(), 30)
    partial = Fraction(1, 10) + Fraction(1, 100) + Fraction(1, 10 ** 6)
    assert iv.lo >= partial
    assert iv.hi - partial <= 2 * Fraction(1, 10 ** 24)
    assert iv.width <= Fraction(1, 2 ** 30)


def test_precision_must_be_positive():
    with pytest.raises(ValueError):
        approximate(sqrt2(), 0)


def test_lacunary_too_fine_raises():
    with pytest.raises(NonConvergent):
        approximate(LacunaryTarget(2, "square"), 10 ** 5)


@pytest.mark.parametrize("target", targets(), ids=lambda t: t.label)
def test_enclosures_nest_and_shrink(target):
    prev = None
    for p in (1, 2, 5, 16, 33, 64, 130, 257):
        iv = approximate(target, p)
        assert iv.width <= Fraction(1, 2 ** p)
        if prev is not None:
            assert prev.lo <= iv.lo and iv.hi <= prev.hi
        prev = iv


@pytest.mark.parametrize("target", [golden_ratio(), sqrt2(), cbrt2()], ids=lambda t: t.label)
def test_algebraic_root_stays_inside(target):
    for p in (3, 17, 64, 200):
        iv = approximate(target, p)
        a, b = poly.sign_at(target.coeffs, iv.lo), poly.sign_at(target.coeffs, iv.hi)
        assert a * b <= 0


def test_algebraic_interval_must_isolate():
    with pytest.raises(ValueError):
        AlgebraicTarget((-2, 0, 1), -2, 2)
    with pytest.raises(ValueError):
        AlgebraicTarget((-4, 0, 2), 1, 2)


def test_degree_bounds():
    assert sqrt2().degree_bound == 2
    assert cbrt2().algebraic_of_degree_at_most(3)
    assert not cbrt2().algebraic_of_degree_at_most(2)
    assert liouville().degree_bound is None
    assert AlgebraicTarget((-2, 1, 1), 0, 2).is_rational


# -- eval_form -------------------------------------------------------------------

def test_zero_and_constant_forms():
    assert eval_form((0, 0, 0), sqrt2(), 10) == RationalInterval(0)
    assert eval_form((1, 0, 0), liouville(), 10) == RationalInterval(1)


def test_form_on_sqrt2():
    iv = eval_form((-3, 2), sqrt2(), 30)
    exact = 2 * SQRT2_DIGITS - 3
    assert iv.lo - Fraction(1, 10 ** 40) <= exact <= iv.hi + Fraction(1, 10 ** 40)
    assert iv.width <= Fraction(6, 2 ** 30)


@given(st.lists(st.integers(-1000, 1000), min_size=1, max_size=5), st.integers(1, 120))
@settings(max_examples=60, deadline=None)
def test_form_width_budget(coeffs, p):
    iv = eval_form(coeffs, cbrt2(), p)
    assert iv.width <= Fraction(1, 2 ** p) * (1 + sum(abs(c) for c in coeffs))


@given(st.lists(st.integers(-50, 50), min_size=1, max_size=5))
def test_form_exact_on_rationals(coeffs):
    iv = eval_form(coeffs, RationalTarget(Fraction(2, 7)), 5)
    assert iv.is_point
    assert iv.lo == sum(Fraction(c) * Fraction(2, 7) ** k for k, c in enumerate(coeffs))


# -- certified_compare ---------------------------------------------------------------

def test_compare_equal_rationals():
    assert certified_compare(Fraction(1, 2), Fraction(1, 2)) is Ordering.EQUAL


def test_compare_sqrt2_against_decimal():
    assert certified_compare(sqrt2(), Fraction("1.414")) is Ordering.GREATER
    assert certified_compare(Fraction("1.415"), sqrt2()) is Ordering.GREATER
    assert certified_compare(Fraction("1.414"), sqrt2()) is Ordering.LESS


def test_identical_reals_undecided_by_refinement():
    r = Lazy.of(sqrt2())
    assert certified_compare(r * r, Fraction(2), p_max=512) is Ordering.UNDECIDED


def test_polynomial_expressions_resolved_exactly():
    t = sqrt2()
    a = PolyExpr(t, (0, 0, 1))          # zeta**2
    b = PolyExpr(t, (2,))
    assert certified_compare(a, b) is Ordering.EQUAL
    assert certified_compare(PolyExpr(t, (0, 3)), PolyExpr(t, (4,))) is Ordering.GREATER


def test_golden_ratio_identity():
    t = golden_ratio()
    assert PolyExpr(t, (-1, -1, 1)).is_zero()
    assert not PolyExpr(t, (-1, 1)).is_zero()


# -- parser -------------------------------------------------------------------------

def test_parse_round_trip():
    for text in ("rat:-3/7", "alg:-2,0,1@[1,2]", "lac:10,factorial", "dec:0.12345"):
        t = parse_target(text)
        assert t.label == text
        assert parse_target(t.label) == t


def test_parse_values():
    assert parse_target("rat:-3/7").value == Fraction(-3, 7)
    assert parse_target("dec:0.125").value == Fraction(1, 8)
    assert float(parse_target("alg:-1,-1,1@[1,2]")) == pytest.approx(1.6180339887498949)
    assert float(parse_target("lac:10,factorial")) == pytest.approx(0.110001)


@pytest.mark.parametrize("text,pos", [
    ("sqrt2", 0),
    ("foo:1", 0),
    ("rat:1/x", 4),
    ("alg:1,a@[0,1]", 6),
    ("alg:-2,0,1@[1,2", 11),
    ("alg:-2,0,1", 10),
    ("lac:10,cubes", 7),
    ("alg:-2,0,1@[-2,2]", 11),
])
def test_parse_errors_carry_position(text, pos):
    with pytest.raises(TargetParseError) as info:
        parse_target(text)
    assert info.value.position == pos
