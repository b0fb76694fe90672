from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from cgiter.arith import (Interval, InvalidDenominatorError, as_rational, common_form, floor, fmt, frac,
                          mod1, norm_sq, normalize_multiplier, root_bounds, sqrt_bounds, to_decimal)

rationals = st.fractions(max_denominator=1000).filter(lambda x: abs(x) < 10**6)


def test_frac_examples():
    assert frac(F(7, 4)) == F(3, 4)
    assert frac(F(-1, 4)) == F(3, 4)
    assert frac(3) == 0


def test_mod1_examples():
    assert mod1((F(3, 2), F(-1, 4))) == (F(1, 2), F(3, 4))
    assert mod1((0, 1)) == (0, 0)
    assert mod1((F(1, 4), F(3, 4))) == (F(1, 4), F(3, 4))


def test_norm_sq_examples():
    assert norm_sq((F(1, 4), F(1, 4))) == F(1, 8)
    assert norm_sq((0, 0)) == 0
    assert norm_sq((F(3, 4), F(1, 4))) == F(5, 8)


def test_normalize_multiplier_examples():
    assert normalize_multiplier((2, 4), 8) == ((1, 2), 4)
    assert normalize_multiplier((1, 3), 4) == ((1, 3), 4)
    assert normalize_multiplier((0, 0), 5) == ((0, 0), 1)


@pytest.mark.parametrize("q", [0, -3])
def test_normalize_rejects_bad_denominator(q):
    with pytest.raises(InvalidDenominatorError):
        normalize_multiplier((1,), q)


def test_floats_rejected():
    with pytest.raises(TypeError):
        as_rational(0.5)
    assert as_rational("3/6") == F(1, 2)


@given(rationals)
def test_floor_plus_frac(x):
    assert floor(x) + frac(x) == x
    assert 0 <= frac(x) < 1


@given(rationals, st.integers(-1000, 1000))
def test_frac_periodic(x, n):
    assert frac(x + n) == frac(x)


@given(st.lists(rationals, min_size=1, max_size=5), st.randoms())
def test_norm_sq_symmetry(v, rnd):
    w = [x if rnd.random() < 0.5 else -x for x in v]
    rnd.shuffle(w)
    assert norm_sq(v) == norm_sq(w)


@given(st.lists(st.integers(-50, 50), min_size=1, max_size=4), st.integers(1, 60))
def test_normalize_preserves_vector(p, q):
    p2, q2 = normalize_multiplier(p, q)
    assert [F(a, q) for a in p] == [F(a, q2) for a in p2]


def test_common_form():
    assert common_form((F(1, 4), F(3, 4))) == ((1, 3), 4)
    assert common_form((F(1, 2), F(1, 3))) == ((3, 2), 6)


@given(st.fractions(min_value=0, max_value=10**4, max_denominator=10**4))
def test_sqrt_bounds_bracket(x):
    lo, hi = sqrt_bounds(x, 40)
    assert lo * lo <= x <= hi * hi
    assert hi - lo <= F(1, 2**40)


def test_sqrt_exact_on_squares():
    assert sqrt_bounds(F(9, 16)) == (F(3, 4), F(3, 4))
    lo, hi = sqrt_bounds(2, 64)
    assert lo < hi


def test_root_bounds():
    lo, hi = root_bounds(200, 2, 50)
    assert lo * lo <= 200 <= hi * hi
    lo, hi = root_bounds(27, 3)
    assert lo == hi == 3


def test_interval_ops():
    s2 = Interval.sqrt(2)
    two = s2 * s2
    assert two.lo <= 2 <= two.hi
    assert Interval(1, 2).certainly_lt(Interval(3, 4))
    assert not Interval(1, 3).certainly_lt(Interval(2, 4))
    assert (Interval(1, 2) + Interval(F(1, 2), 1)) == Interval(F(3, 2), 3)


def test_format():
    assert fmt(F(3, 2)) == "3/2"
    assert fmt(F(4)) == "4"
    assert to_decimal(F(1, 3)) == "0.333333"
    assert to_decimal(F(-2, 3)) == "-0.666667"
