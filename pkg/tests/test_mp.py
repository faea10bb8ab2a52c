import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from resurge import borel, mp

finite = st.floats(-1e6, 1e6, allow_nan=False)


@given(finite, finite)
def test_mpmath_bridge_keeps_signs(re, im):
    v = mp.from_mpmath(mpmath.mpc(re, im), 120)
    assert complex(v) == complex(re, im)
    assert complex(mp.to_mpmath(v)) == complex(re, im)


def test_mpmath_bridge_is_exact_at_high_precision():
    with mpmath.workprec(300):
        x = -mpmath.pi / 7
        back = mp.to_mpmath(mp.from_mpmath(x, 300))
        assert back.real == x


@pytest.mark.parametrize("s", [2 + 6.283185307179586j, 3 + 6.283185307179586j, 4.5 - 2j, -0.5 + 0.1j])
def test_complex_gamma_against_mpmath(s):
    with mp.working(160):
        v = borel.gamma_complex(mp.num(s, 160), 160)
    with mpmath.workprec(200):
        ref = mpmath.gamma(mpmath.mpc(s))
    assert abs(complex(v) - complex(ref)) <= 1e-15 * abs(complex(ref))


def test_unary_functions_keep_working_precision():
    with mp.working(200):
        x = mp.num(2, 200)
        y = mp.exp(mp.log(x))
        assert abs(complex((y - x) * 2 ** 190)) < 1


def test_pair_round_trip():
    with mp.working(160):
        z = mp.num(1, 160) / 3 - mp.num(1j, 160) / 7
    back = mp.from_pair(mp.to_pair(z, 160), 160)
    with mp.working(160):
        assert abs(complex((back - z) * 2 ** 150)) < 1
