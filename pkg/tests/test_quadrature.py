import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from resurge import grid, mp, paths, quadrature

P = 160


@pytest.mark.parametrize("prec", [mp.DOUBLE, P])
def test_gauss_legendre_integrates_polynomials(prec):
    n = 10
    x, w = quadrature.gauss_legendre(n, prec)
    with mp.working(prec):
        for k in range(2 * n):
            got = complex(np.sum(w * x ** k))
            ref = 0 if k % 2 else 2 / (k + 1)
            assert abs(got - ref) < (1e-13 if prec == mp.DOUBLE else 1e-40)


def test_spectral_integration_gives_running_integrals():
    n = 12
    x, _ = quadrature.gauss_legendre(n, P)
    SI = quadrature.spectral_integration(n, P)
    with mp.working(P):
        f = x ** 5
        got = SI @ f
        ref = (x ** 6 - 1) / 6
        assert max(abs(complex(a - b)) for a, b in zip(got, ref)) < 1e-40


@given(st.floats(-0.9, 3.0), st.floats(-7, 7), st.integers(0, 9))
def test_product_integration_is_exact_for_polynomials(bre, bim, k):
    beta = complex(bre, bim)
    n = 10
    s, W = quadrature.product_integration(n, beta, P)
    with mp.working(P):
        vals = s ** k
        got = [complex(v) for v in W @ vals]
    with mpmath.workprec(P):
        for i in range(n):
            e = mpmath.mpc(beta) + k + 1
            ref = complex(mpmath.power(mp.to_mpmath(s[i]).real, e) / e)
            assert abs(got[i] - ref) < 1e-25 * max(1, abs(ref))
        assert abs(got[-1] - complex(1 / e)) < 1e-25


def test_grid_integrates_exponential_along_gamma_tilde():
    path = paths.gamma_tilde(paths.segment_gamma_m(1), 2j * math.pi)
    g = grid.build_grid(path, 0, grid.GridConfig(), P)
    with mp.working(P):
        vals = [mp.exp(z) for z in g.zeta]
    got = complex(g.integrate(vals))
    # ∫_0^ω e^ζ dζ = e^ω − 1 = 0
    assert abs(got) < 1e-40


def test_grid_refines_toward_lattice_end_point():
    path = paths.gamma_tilde(paths.segment_gamma_m(1), 2j * math.pi)
    g = grid.build_grid(path, 0, grid.GridConfig(), mp.DOUBLE)
    d = min(abs(complex(z) - 2j * math.pi) for z in g.zeta)
    assert d < 1e-9
    assert g.stats()["nodes"] == g.n


def test_grid_config_scaling():
    cfg = grid.GridConfig()
    half = cfg.scaled(0.5)
    assert half.nodes < cfg.nodes
