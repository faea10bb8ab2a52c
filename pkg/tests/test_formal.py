import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from resurge import formal, germ, mp, series
from resurge.errors import ValTooLow
from resurge.series import FracSeries, IntSeries

D = mp.DOUBLE
small = st.complex_numbers(max_magnitude=2.0, allow_nan=False, allow_infinity=False)


def close(a, b, tol):
    return np.allclose(mp.to_complex(np.asarray(a)), mp.to_complex(np.asarray(b)), rtol=tol, atol=tol)


@given(st.lists(small, min_size=3, max_size=14))
def test_E_inverts_shift_minus_identity(tail):
    psi = IntSeries([0, 0] + tail, D)
    phi = formal.op_E(psi)
    back = series.shift_minus_identity(phi)
    n = min(back.order, psi.order)
    assert close(back.coeffs[:n + 1], psi.coeffs[:n + 1], 1e-9)


@given(st.complex_numbers(max_magnitude=4, allow_nan=False, allow_infinity=False).filter(lambda b: b.real >= 0),
       st.lists(small, min_size=2, max_size=12))
def test_E_beta_inverts_shift_minus_identity(beta, coeffs):
    psi = FracSeries(beta + 2, coeffs, D)
    phi = formal.op_E_beta(psi)
    assert abs(complex(phi.gamma) - (beta + 1)) < 1e-14
    back = series.shift_minus_identity(phi)
    n = min(back.order, psi.order)
    # shift_minus_identity keeps the offset, so the first coefficient is structurally zero
    assert abs(complex(back.coeffs[0])) < 1e-12
    assert close(back.coeffs[1:n + 1], psi.coeffs[:n], 1e-8)


def test_E_beta_leading_coefficient():
    beta = 0.7 + 1.3j
    phi = formal.op_E_beta(FracSeries.monomial(beta + 2, 6, D))
    assert abs(complex(phi.coeffs[0]) - 1 / (beta + 1)) < 1e-14


def test_E_beta_at_zero_reproduces_E():
    psi = IntSeries([0, 0, 1, -2, 0.5, 3], D)
    a = formal.op_E(psi)
    b = formal.op_E_beta(psi.as_frac()).as_int()
    n = min(a.order, b.order)
    assert close(a.coeffs[:n + 1], b.coeffs[:n + 1], 1e-12)


def test_E_rejects_low_valuation():
    with pytest.raises(ValTooLow):
        formal.op_E(IntSeries([0, 1, 1], D))


@pytest.mark.parametrize("name", ["quad", "rho0"])
def test_phi_tilde_solves_the_difference_equation(name):
    d = germ.germ_data(germ.preset(name), 40, 160)
    phi = formal.solve_phi_tilde(d)
    lhs = series.shift_minus_identity(phi) - d.composer.apply(phi, minus_identity=True)
    with mp.working(160):
        err = max(abs(complex(lhs.coeffs[k] - d.b_star.coeffs[k])) / max(1.0, abs(complex(d.b_star.coeffs[k])))
                  for k in range(31))
    assert err < 1e-30


def test_quad_phi_tilde_first_terms():
    # hand expansion of (S − C)φ = b_* for z²/(z − 1)
    d = germ.germ_data(germ.preset("quad"), 20, 160)
    phi = formal.solve_phi_tilde(d)
    ref = [0, 1 / 2, 1 / 3, 13 / 36]
    assert close(phi.coeffs[:4], ref, 1e-15)


@pytest.mark.parametrize("re_alpha,N", [(0.0, 0), (-0.3, 1), (-1.2, 3), (-1.0, 2), (2.0, 0)])
def test_minimal_N(re_alpha, N):
    assert formal.minimal_N(complex(re_alpha, 5.0)) == N


def test_split_is_exact():
    d = germ.germ_data(germ.preset("quad"), 20, 160)
    phi = formal.solve_phi_tilde(d)
    head, tail, N, beta = formal.split_at_N(phi, 2j, 3)
    assert N == 3
    assert head.val == 1 and tail.val == 4
    with mp.working(160):
        assert all(h + t == p for h, t, p in zip(head.coeffs, tail.coeffs, phi.coeffs))
    with pytest.raises(ValueError):
        formal.split_at_N(phi, -1.2 + 0j, 2)


@pytest.mark.parametrize("N", [None, 1, 2, 4])
def test_b_N_valuation(N):
    d = germ.germ_data(germ.preset("quad"), 40, 160)
    st_ = formal.omega_setup(d, 1, N)
    assert st_.b_N.val >= st_.N + 2
    assert abs(complex(st_.b_alpha.gamma) - complex(st_.beta + 2)) < 1e-30


def test_b_alpha_reduces_to_b_star_when_alpha_vanishes():
    d = germ.germ_data(germ.preset("rho0"), 30, 160)
    st_ = formal.omega_setup(d, 1)
    assert complex(st_.alpha) == 0
    n = st_.b_alpha.order
    with mp.working(160):
        assert all(abs(complex(st_.b_alpha.coeffs[k] - d.b_star.coeffs[k + 2])) < 1e-40 for k in range(n + 1))


def test_B_alpha_gains_one_order():
    d = germ.germ_data(germ.preset("quad"), 30, 160)
    alpha = formal.alpha_of(d, 1)
    phi = FracSeries(alpha + 1, mp.array([1, 0.5, -0.25] + [0] * 20, 160), 160)
    out = formal.op_B_alpha(phi, alpha, d)
    assert abs(complex(out.gamma) - complex(alpha + 2)) < 1e-30


def test_phi_sequence_leading_ratio():
    # for z²/(z − 1), c_α = 1 + α/z + … and b/z = O(z^{−2}), so the leading
    # coefficient of Φ̃_k is multiplied by α/(β + 1) at every step
    d = germ.germ_data(germ.preset("quad"), 40, 160)
    phis = formal.phi_sequence_formal(d, 1, 6)
    alpha = 2j * np.pi
    ratio = alpha / (alpha + 1)
    for a, b in zip(phis, phis[1:]):
        assert abs(complex(b.coeffs[0]) / complex(a.coeffs[0]) - ratio) < 1e-12


def test_psi_valuations_and_exponential_identity():
    d = germ.germ_data(germ.preset("quad"), 30, 160)
    with mp.working(160):
        om = mp.two_pi_i(160)
    K = 12
    ps = formal.psi_sequence(d, om, K)
    assert [p.val for p in ps] == list(range(K + 1))
    phi = formal.solve_phi_tilde(d)
    with mp.working(160):
        E = series.exp(phi.scale(-om))
        acc = ps[0]
        for p in ps[1:]:
            acc = acc + p
        # Ψ̃_k with k > K start at order K + 1, so orders ≤ K are complete
        for n in range(K + 1):
            ref = complex(E.coeffs[n])
            assert abs(complex(acc.coeffs[n]) - ref) <= 1e-25 * max(1.0, abs(ref))
