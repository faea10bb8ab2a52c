from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from resurge import mp, series
from resurge.errors import NonUnitLeadingTerm, TruncationOverflow
from resurge.series import FracSeries, IntSeries

D = mp.DOUBLE
small = st.complex_numbers(max_magnitude=2.0, allow_nan=False, allow_infinity=False)


def coeff_lists(min_size=2, max_size=12):
    return st.lists(small, min_size=min_size, max_size=max_size)


def close(a, b, tol=1e-9):
    a, b = np.asarray(mp.to_complex(a)), np.asarray(mp.to_complex(b))
    return np.allclose(a, b, rtol=tol, atol=tol)


@given(coeff_lists(), coeff_lists())
def test_mul_matches_polynomial_product(a, b):
    n = min(len(a), len(b)) - 1
    got = series.mul(IntSeries(a, D), IntSeries(b, D))
    ref = np.convolve(np.array(a), np.array(b))[:n + 1]
    assert got.order >= n
    assert close(got.coeffs[:n + 1], ref)


@given(coeff_lists(min_size=3))
def test_exp_log_round_trip(tail):
    s = IntSeries([0] + tail, D)
    one_plus = IntSeries.one(s.order, D) + s
    back = series.log(series.exp(s))
    assert close(back.coeffs, s.coeffs, 1e-7)
    assert close(series.exp(series.log(one_plus)).coeffs, one_plus.coeffs, 1e-7)


@given(coeff_lists(min_size=3), coeff_lists(min_size=3))
def test_exp_is_a_homomorphism(a, b):
    n = min(len(a), len(b))
    sa, sb = IntSeries([0] + a[:n], D), IntSeries([0] + b[:n], D)
    lhs = series.exp(sa + sb)
    rhs = series.mul(series.exp(sa), series.exp(sb))
    assert close(lhs.coeffs[:rhs.order + 1], rhs.coeffs, 1e-7)


@given(coeff_lists(min_size=3))
def test_inverse(tail):
    s = IntSeries([1] + tail, D)
    prod = series.mul(s, series.inverse(s))
    assert close(prod.coeffs, np.eye(1, prod.order + 1)[0], 1e-7)


def test_log_needs_unit_constant():
    with pytest.raises(NonUnitLeadingTerm):
        series.log(IntSeries([2, 1, 0], D))


def test_compose_shift_of_monomial_is_geometric():
    # 1/(z + c) = Σ (−c)^n z^{−n−1}, computed in exact rationals
    c = Fraction(3, 7)
    n = 20
    got = series.compose_shift(IntSeries.monomial(1, n, 160), c)
    ref = [Fraction(0)] + [(-c) ** k for k in range(n)]
    with mp.working(160):
        for k in range(n + 1):
            r = mp.num(ref[k], 160)
            assert abs(complex(got.coeffs[k] - r)) < 1e-40


@given(st.floats(-1, 1), st.floats(-1, 1), coeff_lists(min_size=4))
def test_compose_shift_is_additive(a, b, coeffs):
    s = IntSeries([0] + coeffs, D)
    lhs = series.compose_shift(series.compose_shift(s, a), b)
    rhs = series.compose_shift(s, a + b)
    assert close(lhs.coeffs, rhs.coeffs, 1e-8)


@given(st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False).filter(lambda g: g.real > 0.2),
       coeff_lists(min_size=3))
def test_frac_shift_matches_binomial(gamma, coeffs):
    s = FracSeries(gamma, coeffs, D)
    got = series.compose_shift(s, 0.5)
    # check by evaluation at a large z where the truncation error is tiny
    z = 400.0
    n = s.order
    lhs = sum(c * (z + 0.5) ** (-gamma - k) for k, c in enumerate(coeffs))
    rhs = sum(complex(c) * z ** (-gamma - k) for k, c in enumerate(mp.to_complex(got.coeffs)))
    assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(lhs)) + abs(z) ** (-gamma.real - n - 1) * 10 ** (n + 1)


def test_truncation_is_tracked():
    s = IntSeries([0, 1, 2, 3], D)
    assert s.order == 3
    with pytest.raises(TruncationOverflow):
        s[4]
    with pytest.raises(TruncationOverflow):
        s.truncate(5)
    assert s.truncate(2).order == 2


def test_shift_minus_identity_gains_an_order():
    s = IntSeries.monomial(1, 10, 160)
    d = series.shift_minus_identity(s)
    # 1/(z−1) − 1/z = z^{−2} + z^{−3} + ...
    assert d.val == 2
    assert d.order == 11
    assert all(abs(complex(c) - 1) < 1e-40 for c in d.coeffs[2:])


@given(coeff_lists(), st.booleans())
def test_json_round_trip(coeffs, frac):
    s = FracSeries(1.5 + 0.25j, coeffs, D) if frac else IntSeries(coeffs, D)
    back = series.from_json(series.to_json(s))
    assert type(back) is type(s)
    assert close(back.coeffs, s.coeffs, 1e-15)


def test_json_round_trip_keeps_high_precision():
    with mp.working(200):
        c = mp.num(1, 200) / 3
    s = IntSeries(mp.array([0, c, -c], 200), 200)
    back = series.from_json(series.to_json(s))
    with mp.working(200):
        assert abs(complex((back.coeffs[1] - c) * 2 ** 190)) < 1
