import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from resurge import borel, germ, mp
from resurge.errors import DivergentLaplace, InsufficientTerms
from resurge.series import FracSeries, IntSeries

P = 160


def test_quad_borel_image_is_exponential():
    d = germ.germ_data(germ.preset("quad"), 40, P)
    B = borel.borel_int(d.b, d.radius_r)
    for n in range(39):
        assert abs(complex(B.coeffs[n]) - 2.0 ** n / math.factorial(n)) < 1e-30


def test_rho0_borel_image():
    d = germ.germ_data(germ.preset("rho0"), 40, P)
    B = borel.borel_int(d.b, d.radius_r)
    for z in (0.5, 1.0 + 1.0j, -2.0):
        assert abs(complex(B(mp.num(z, P))) - z * np.exp(z)) < 1e-12 * max(1, abs(z * np.exp(z)))


def test_frac_monomial_borel_image():
    # 𝓑(z^{−γ}) = ζ^{γ−1}/Γ(γ)
    gamma = 1.5 + 2j
    g = borel.borel_frac(FracSeries.monomial(gamma, 4, P))
    ref = complex(1 / mpmath.gamma(gamma))
    assert abs(complex(g.gamma) - (gamma - 1)) < 1e-30
    assert abs(complex(g.entire_part.coeffs[0]) - ref) < 1e-15 * abs(ref)
    val = complex(g(2.0, 0.3))
    z = 2.0 * np.exp(0.3j)
    assert abs(val - z ** (gamma - 1) * ref) < 1e-13 * abs(val)


def test_branch_follows_the_lift():
    g = borel.borel_frac(FracSeries.monomial(0.5, 2, P))
    # ζ^{−1/2} changes sign after one full turn
    with mp.working(P):
        turn = 2 * mp.pi(P)
    a = g(1.0, 0.0)
    b = g(1.0, turn)
    with mp.working(P):
        assert abs(complex(a + b)) < 1e-40


@given(st.floats(0.1, 3.0), st.floats(-0.5, 1.5))
def test_gamma_ladder(re, im):
    s = complex(re, im)
    with mp.working(P):
        lad = borel._rgamma_ladder(mp.num(s, P), 6, P)
    for j in range(7):
        ref = complex(mpmath.rgamma(s + j))
        assert abs(complex(lad[j]) - ref) <= 1e-14 * max(abs(ref), 1e-300)


def test_ladder_starts_past_poles():
    with mp.working(P):
        lad = borel._rgamma_ladder(mp.num(-2, P), 5, P)
    assert [complex(v) for v in lad[:3]] == [0, 0, 0]
    assert abs(complex(lad[3]) - 1) < 1e-40
    assert abs(complex(lad[5]) - 0.5) < 1e-40


@pytest.mark.parametrize("z", [8.0, 6.0 - 2.0j])
def test_laplace_inverts_borel(z):
    # 𝓛⁰ of e^{2ζ} is 1/(z − 2)
    d = germ.germ_data(germ.preset("quad"), 160, P)
    B = borel.borel_int(d.b, d.radius_r)
    val = complex(borel.laplace_ray(B, 0.0, z))
    assert abs(val - 1 / (z - 2)) < 1e-18


def test_laplace_of_branched_monomial():
    gamma = 0.5 + 1j
    # a single term: declare a tiny exponential type so the tail bound is honest
    g = borel.borel_frac(FracSeries.monomial(gamma, 30, P), radius=1e-3)
    z = 5.0
    val = complex(borel.laplace_ray(g, 0.0, z))
    assert abs(val - z ** (-gamma)) < 1e-15


def test_laplace_refuses_divergent_direction():
    d = germ.germ_data(germ.preset("quad"), 40, P)
    B = borel.borel_int(d.b, d.radius_r)
    with pytest.raises(DivergentLaplace):
        borel.laplace_ray(B, 0.0, 2.1)


def test_tail_bound_is_enforced():
    d = germ.germ_data(germ.preset("quad"), 12, P)
    B = borel.borel_int(d.b, d.radius_r)
    with pytest.raises(InsufficientTerms):
        borel.eval_entire(B, 20.0, tol=1e-20)
    assert B.tail_bound(0.1) < 1e-12
