import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sympindex.angles import Angle, SurdSum, frac_parts_sum, int_parts, parse_sqrt_expr
from sympindex.errors import DomainError, PrecisionError


def surd(turn):
    """Algebraic angle with the given turn expression, ``theta = 2 pi turn``."""
    return Angle.from_expr(f"2*pi*({turn})")



def test_int_parts_integer():
    assert int_parts(2) == (2, 0, 2, 0)


def test_int_parts_float():
    lo, frac, ceil, phi = int_parts(2.3)
    assert (lo, ceil, phi) == (2, 3, 1)
    assert frac == pytest.approx(0.3)


def test_int_parts_surd_matches_isqrt():
    # 3(sqrt2 - 1) = sqrt(18) - 3, floor via isqrt of 18 * 10^40
    a = SurdSum.sqrt(2) * 3 - 3
    lo, frac, ceil, phi = int_parts(a)
    assert (lo, ceil, phi) == (1, 2, 1)
    scale = 10**20
    ref = Fraction(math.isqrt(18 * scale * scale), scale) - 3
    assert abs(float(frac) - float(ref - 1)) < 1e-15
    assert float(frac) == pytest.approx(0.242640687119285)


def test_int_parts_fraction():
    assert int_parts(Fraction(7, 3)) == (2, Fraction(1, 3), 3, 1)
    assert int_parts(Fraction(-7, 3))[0] == -3


def test_float_near_integer_refused():
    with pytest.raises(PrecisionError):
        int_parts(3.0 + 1e-12)


def test_parse_and_exact_sum():
    x = parse_sqrt_expr("2*pi*(4 - sqrt(2) - sqrt(3))")
    y = parse_sqrt_expr("2*pi*(sqrt(2)-1)") + parse_sqrt_expr("pi*(2*sqrt(3)-2)")
    assert (x + y).is_integer() and (x + y).floor() == 2
    assert parse_sqrt_expr("2*pi*sqrt(8)") == SurdSum.sqrt(2) * 2


def test_sqrt_expr_radian_form():
    a = Angle.from_expr("2*pi*(sqrt(2)-1)")
    assert a.kind == "sqrt_expr"
    assert a.value == pytest.approx(2 * math.pi * (math.sqrt(2) - 1))


def test_rational_angle_must_be_reduced():
    with pytest.raises(DomainError):
        Angle.rational(2, 4)


def test_json_round_trip():
    for a in (Angle.rational(3, 7), surd("sqrt(2)-1"), Angle.from_float(1.0)):
        assert Angle.from_json(a.to_json()) == a


def test_frac_parts_sum_is_exact():
    thetas = [surd(e) for e in ("sqrt(2)-1", "sqrt(3)-1", "4-sqrt(2)-sqrt(3)")]
    assert frac_parts_sum(thetas, 2) == 2
    assert frac_parts_sum(thetas, 3) == 1


@settings(max_examples=200, deadline=None)
@given(
    a=st.fractions(min_value=-50, max_value=50, max_denominator=30),
    b=st.fractions(min_value=-5, max_value=5, max_denominator=30),
    d=st.sampled_from([2, 3, 5, 7, 11]),
)
def test_surd_floor_brackets_value(a, b, d):
    x = SurdSum.rational(a) + SurdSum.sqrt(d, b)
    lo, frac, ceil, phi = int_parts(x)
    assert lo <= float(x) + 1e-9 and float(x) < lo + 1 + 1e-9
    assert ceil - lo == phi
    assert (phi == 0) == x.is_integer()


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 10_000))
def test_floor_table_matches_single_floors(m_max):
    a = surd("sqrt(7) - 2")
    table = a.floor_multiples(min(m_max, 300))
    for m in (1, len(table) // 2 or 1, len(table)):
        assert table[m - 1] == a.floor_mul(m)
