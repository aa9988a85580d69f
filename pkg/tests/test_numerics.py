"""Certified arithmetic: enclosure guarantees, monotone root finding."""

from __future__ import annotations

from fractions import Fraction as F

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cantormeasure.numerics import (
    BracketError,
    CertifiedReal,
    cr_pow,
    decimal_string,
    format_rational,
    parse_rational,
    pow_certified,
    solve_monotone_root,
    working_precision,
)

mpmath.mp.dps = 60


def mpf_frac(x, digits: int = 40) -> F:
    """High-precision mpmath value as an exact nearby Fraction."""
    return F(mpmath.nstr(x, digits))


rationals = st.fractions(
    min_value=F(-50), max_value=F(50), max_denominator=10**6
)
small_rationals = st.fractions(min_value=F(1, 1000), max_value=F(50), max_denominator=10**4)


class TestRationalStrings:
    @given(rationals)
    def test_round_trip(self, q):
        assert parse_rational(format_rational(q)) == q

    def test_parse_forms(self):
        assert parse_rational("3/4") == F(3, 4)
        assert parse_rational("-7") == -7
        with pytest.raises(ValueError):
            parse_rational("3/0")

    def test_decimal_string_directed(self):
        assert decimal_string(F(1, 3), 5, "floor") == "0.33333"
        assert decimal_string(F(1, 3), 5, "ceil") == "0.33334"
        assert decimal_string(F(-1, 3), 5, "floor") == "-0.33334"
        assert decimal_string(F(1, 2), 3, "floor") == "0.500"


class TestEnclosures:
    def test_exact_rational_contains(self):
        x = CertifiedReal.from_rational(F(1, 3))
        assert x.contains(F(1, 3))
        assert x.lo < x.hi  # 1/3 is not dyadic

    @given(rationals, rationals)
    @settings(max_examples=60)
    def test_arithmetic_contains_exact(self, a, b):
        xa, xb = CertifiedReal.from_rational(a), CertifiedReal.from_rational(b)
        assert (xa + xb).contains(a + b)
        assert (xa - xb).contains(a - b)
        assert (xa * xb).contains(a * b)
        if b != 0 and not (xb.lo <= 0 <= xb.hi):
            assert (xa / xb).contains(F(a, 1) / b)

    @given(rationals, rationals, rationals, rationals)
    @settings(max_examples=60)
    def test_inclusion_monotonicity(self, a, b, wa, wb):
        # op(x, y) ⊆ op(x', y') whenever x ⊆ x', y ⊆ y'
        wa, wb = abs(wa) / 100, abs(wb) / 100
        x = CertifiedReal.from_pair(a, a + wa)
        xp = CertifiedReal.from_pair(a - wa, a + 2 * wa)
        y = CertifiedReal.from_pair(b, b + wb)
        yp = CertifiedReal.from_pair(b - wb, b + 2 * wb)
        for op in (lambda u, v: u + v, lambda u, v: u - v, lambda u, v: u * v):
            narrow, wide = op(x, y), op(xp, yp)
            assert wide.lo <= narrow.lo and narrow.hi <= wide.hi

    def test_division_by_zero_interval(self):
        x = CertifiedReal.from_rational(1)
        z = CertifiedReal.from_pair(F(-1), F(1))
        with pytest.raises(ZeroDivisionError):
            x / z


class TestPow:
    def test_integer_exponent_exact(self):
        assert pow_certified(F(1, 2), F(1)).contains(F(1, 2))
        v = pow_certified(F(1, 2), F(3))
        assert v.contains(F(1, 8)) and v.width() < F(1, 10**30)

    def test_identity_base(self):
        v = pow_certified(F(1), CertifiedReal.from_pair(F(-5), F(7)))
        assert v.lo == 1 and v.hi == 1

    def test_third_to_log3_2(self):
        # (1/3)^(log_3 2) = 1/2 by hand
        val = mpmath.log(2) / mpmath.log(3)
        log32 = CertifiedReal.from_pair(
            mpf_frac(val) - F(1, 10**30), mpf_frac(val) + F(1, 10**30)
        )
        v = pow_certified(F(1, 3), log32)
        assert v.contains(F(1, 2))
        assert v.width() < F(1, 10**25)

    def test_domain_error(self):
        with pytest.raises(ValueError):
            pow_certified(F(0), F(1, 2))
        with pytest.raises(ValueError):
            pow_certified(F(-1, 2), F(1, 2))

    @given(small_rationals, st.fractions(min_value=F(-3), max_value=F(3), max_denominator=64))
    @settings(max_examples=40)
    def test_against_mpmath(self, base, expo):
        v = pow_certified(base, expo)
        ref = mpmath.power(mpmath.mpf(base.numerator) / base.denominator,
                           mpmath.mpf(expo.numerator) / expo.denominator)
        lo, hi = v.as_fractions()
        assert mpmath.mpf(float(lo)) <= ref * (1 + mpmath.mpf("1e-15"))
        assert ref * (1 - mpmath.mpf("1e-15")) <= mpmath.mpf(float(hi))

    def test_cr_pow_interval_base(self):
        base = CertifiedReal.from_pair(F(1, 4), F(1, 2))
        expo = CertifiedReal.from_rational(F(1, 2))
        v = cr_pow(base, expo)
        assert v.contains(F(1, 2))  # sqrt(1/4)


class TestSolveMonotoneRoot:
    def test_log3_2(self):
        # 2 * 3^(-x) - 1 = 0  at  x = log_3 2
        def f(x):
            return pow_certified(F(3), -CertifiedReal.from_rational(x)) * 2 - 1

        root = solve_monotone_root(f, (F(0), F(1)), F(1, 10**12))
        expected = mpf_frac(mpmath.log(2) / mpmath.log(3))
        assert root.width() <= F(1, 10**12)
        assert abs(root.midpoint() - expected) < F(1, 10**11)

    def test_quarter_touching_characteristic(self):
        # determinant of the touching-quarters incidence system collapses to
        # 5u^4 - 5u^2 + 1 in u = 2^(-x); root at x = log_4(5+sqrt(5)) - 1/2
        def f(x):
            u = pow_certified(F(2), -CertifiedReal.from_rational(x))
            u2 = u * u
            return u2 * 5 - u2 * u2 * 5 - 1

        root = solve_monotone_root(f, (F(8, 10), F(1)), F(1, 10**12))
        expected = mpf_frac(mpmath.log(5 + mpmath.sqrt(5)) / mpmath.log(4) - mpmath.mpf(1) / 2)
        assert abs(root.midpoint() - expected) < F(1, 10**10)

    def test_no_sign_change(self):
        def f(x):
            return pow_certified(F(3), -CertifiedReal.from_rational(x)) * 2 - 1

        with pytest.raises(BracketError):
            solve_monotone_root(f, (F(9, 10), F(1)), F(1, 10**6))

    def test_result_brackets_sign_change(self):
        def f(x):
            return pow_certified(F(2), -CertifiedReal.from_rational(x)) * 3 - 1

        root = solve_monotone_root(f, (F(0), F(4)), F(1, 10**10))
        lo, hi = root.as_fractions()
        with working_precision(192):
            assert f(lo).lo > 0 or f(lo).contains(0)
            assert f(hi).hi < 0 or f(hi).contains(0)
