import math
from functools import lru_cache

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from resurge import fixed, formal, germ, kernel, mp
from resurge.cache import KernelCache

P = 160


def rho0_kernel(xi, zeta, terms=60):
    # b̂^{*k} = ζ^{2k−1}e^ζ/(2k−1)! for b = 1/(w − 1)^2, and c_0 = 1
    t = zeta - xi
    return sum((-xi) ** k / math.factorial(k) * t ** (2 * k - 1) * complex(math.e ** t.real) *
               complex(math.cos(t.imag), math.sin(t.imag)) / math.factorial(2 * k - 1) for k in range(1, terms))


@lru_cache(maxsize=None)
def rho0_table():
    d = germ.germ_data(germ.preset("rho0"), 140, P)
    return kernel.build_kernel(d, 0, 7.0, 7.0, tol=1e-30)


@lru_cache(maxsize=None)
def quad_table():
    d = germ.germ_data(germ.preset("quad"), 140, P)
    return kernel.build_kernel(d, formal.alpha_of(d, 1), 7.0, 7.0, tol=1e-30), d


@given(st.complex_numbers(max_magnitude=4, allow_nan=False, allow_infinity=False),
       st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False))
@settings(max_examples=25)
def test_rho0_kernel_closed_form(xi, t):
    got = complex(rho0_table()(xi, xi + t))
    ref = rho0_kernel(xi, xi + t)
    assert abs(got - ref) <= 1e-11 * max(1.0, abs(ref))


@given(st.complex_numbers(max_magnitude=6.5, allow_nan=False, allow_infinity=False))
@settings(max_examples=25)
def test_diagonal_is_affine(xi):
    # K(ξ, ξ) = u_0(0) − ξ·u_1(0) = α + ρξ, since u_k(0) = 0 for k ≥ 2
    K, d = quad_table()
    with mp.working(P):
        diff = K(xi, xi) - (mp.two_pi_i(P) - mp.num(xi, P))
    assert abs(complex(diff)) < 1e-25 * max(1, abs(xi))


def test_matrix_matches_direct_evaluation():
    K, _ = quad_table()
    pts = [mp.num(z, P) for z in (0.1 + 0.2j, 1.0, 1.0 + 3j, 0.5 + 6j, 6.2j)]
    shift = P
    with mp.working(P):
        center = mp.num(0.5 + 3j, P)
        # the joint expansion cancels about this many bits, as the solver budgets for
        assert K.majorant_bits(center, 3.3, 3.3) < 40
        M = K.matrix(pts, pts, center, shift)
    re, im = M.pairs()
    n = len(pts)
    for i in range(n):
        for j in range(n):
            got = complex(fixed.from_fixed(re[i * n + j], im[i * n + j], shift, P))
            ref = complex(K(pts[j], pts[i]))
            assert abs(got - ref) < 1e-30 * max(1, abs(ref))


def test_kernel_vanishes_for_translation():
    d = germ.germ_data(germ.preset("translation"), 16, P)
    K = kernel.build_kernel(d, 0, 4.0, 4.0)
    assert K.is_zero
    assert complex(K(1.0, 2.0)) == 0


def test_tail_bound_meets_tolerance():
    K, _ = quad_table()
    assert K.tail_bound(7.0, 7.0) < 1e-30


def test_cache_round_trip(tmp_path):
    d = germ.germ_data(germ.preset("quad"), 64, P)
    cache = KernelCache(tmp_path)
    a = kernel.build_kernel(d, 1j, 2.0, 2.0, tol=1e-15, cache=cache)
    b = kernel.build_kernel(d, 1j, 2.0, 2.0, tol=1e-15, cache=cache)
    assert (cache.misses, cache.hits) == (1, 1)
    assert complex(a(0.3, 1.1)) == complex(b(0.3, 1.1))
    assert KernelCache.key("g", [1, 2], 3, 4, 1.0, 2.0, 1e-3) != KernelCache.key("g", [1, 2], 3, 4, 1.0, 2.0, 1e-4)
