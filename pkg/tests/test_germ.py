from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from resurge import germ, mp
from resurge.errors import NotRational, NotSimpleParabolic
from resurge.germ import GermSpec

P = 160


def coeffs(s, n):
    return [complex(c) for c in s.coeffs[:n]]


def test_quad_expansion_is_geometric():
    # b(w) = 1/(w − 2) = Σ 2^{n−1} w^{−n}
    d = germ.germ_data(germ.preset("quad"), 30, P)
    assert coeffs(d.b, 31) == [0] + [2.0 ** (n - 1) for n in range(1, 31)]
    assert complex(d.rho) == -1


def test_rho0_expansion():
    # b(w) = 1/(w − 1)^2 = Σ (n − 1) w^{−n}
    d = germ.germ_data(germ.preset("rho0"), 20, P)
    assert coeffs(d.b, 21) == [0, 0] + [float(n - 1) for n in range(2, 21)]
    assert complex(d.rho) == 0


def test_translation_is_empty():
    d = germ.germ_data(germ.preset("translation"), 12, P)
    assert all(c == 0 for c in coeffs(d.b, 13))
    assert all(c == 0 for c in coeffs(d.b_star, 13))


@given(st.fractions(-3, 3).filter(lambda c: c != 0), st.fractions(-2, 2))
def test_single_pole_germ(c, p):
    # f(z) = z + 1 + c/(z − p) has b(w) = c/(w − 1 − p)
    num = (-p - c * 0 + c, -p - 1 + 1, 1)  # (z + 1)(z − p) + c expanded below
    num = (c - p, 1 - p, 1)
    spec = GermSpec("infinity", num, (-p, 1))
    d = germ.germ_data(spec, 12, P)
    q = 1 + p
    for n in range(1, 13):
        ref = c * q ** (n - 1)
        with mp.working(P):
            assert abs(complex(d.b.coeffs[n] - mp.num(ref, P))) < 1e-30 * max(1, abs(float(ref)))
    assert abs(complex(d.rho) + float(c)) < 1e-30


@given(st.fractions(-3, 3), st.fractions(-3, 3))
def test_b_star_has_no_reciprocal_term(c, e):
    spec = GermSpec("infinity", (c + e * 0, 1, 1), (0, 1))  # z + 1 + c/z
    d = germ.germ_data(spec, 16, P)
    assert d.b_star.val >= 2
    assert abs(complex(d.b_star.coeffs[1])) < 1e-35


def test_origin_chart_conjugates_to_infinity():
    # f(w) = w + w^2 at the origin; z = −1/w gives F(z) = −1/f(−1/z)
    spec = germ.from_descriptor({"type": "polynomial_origin", "coeffs": [0, 1, 1]})
    inf = germ.normalize_to_infinity(spec)
    for z in (50.0, 80 + 30j, -60 + 10j):
        w = -1 / z
        ref = -1 / (w + w * w)
        assert abs(inf(z) - ref) < 1e-12 * abs(ref)
        assert abs(inf(z) - z - 1) < 2 / abs(z)


@pytest.mark.parametrize("spec", [
    GermSpec("infinity", (2, 1), (1,)),                  # z + 2
    GermSpec("infinity", (1, 2), (1,)),                  # 2z + 1
    GermSpec("origin", (0, 1, 0, 1), (1,)),              # w + w^3
    GermSpec("origin", (0, 2, 1), (1,)),                 # 2w + w^2
])
def test_rejects_non_simple_parabolic(spec):
    with pytest.raises(NotSimpleParabolic):
        germ.germ_data(spec, 10, P)


def test_descriptor_forms_agree():
    a = germ.from_descriptor("z^2/(z-1)")
    b = germ.from_descriptor({"type": "preset", "name": "quad"})
    c = germ.from_descriptor({"type": "rational_infinity", "num": [0, 0, 1], "den": [-1, 1], "name": "quad"})
    assert a == b == c
    assert a.digest() == c.digest()
    with pytest.raises(NotRational):
        germ.from_descriptor("no-such-germ")


def test_exact_string_coefficients():
    spec = germ.from_descriptor({"type": "rational_infinity", "num": ["1/3", 1, 1], "den": [0, 1]})
    assert spec.numerator[0] == Fraction(1, 3)


def test_radius_is_at_least_one():
    assert germ.radius_of(germ.preset("translation")) == 1.0
    assert germ.radius_of(germ.preset("quad")) == 2.0
