"""Formal operators on z^{-1}-series and the sequences built from them.

Notation: S is the shift φ ↦ φ(z − 1), C is the composition
φ ↦ φ(z + b(z)).  E inverts S − I on z^{-2}ℂ[[z^{-1}]]; E_β does the same
on z^{-β-2}ℂ[[z^{-1}]].
"""

import math
from dataclasses import dataclass

import numpy as np

from . import mp
from .errors import OrderGainViolated, ValCheckFailed, ValTooLow, ZeroDivisor
from .series import FracSeries, IntSeries, mul, shift_matrix, shift_minus_identity


def _tol(prec):
    return 1e-11 if mp.is_double(prec) else 2.0 ** (24 - prec)


def _solve_shift(psi, gamma_phi):
    """Solve (S − I)φ = ψ where φ has offset γ_φ and ψ offset γ_φ + 1."""
    prec = psi.prec
    n = psi.order
    with mp.working(prec):
        g = mp.num(gamma_phi, prec)
        M = shift_matrix(g, -1, n + 2, prec)
        phi = mp.zeros(n + 1, prec)
        for k in range(n + 1):
            d = M[k + 1, k]
            if d == 0:
                raise ZeroDivisor(f"γ + n vanishes at n = {k}")
            acc = psi.coeffs[k]
            if k:
                acc = acc - np.dot(M[k + 1, :k], phi[:k])
            phi[k] = acc / d
    return phi


def op_E(psi):
    """The inverse of S − I, mapping z^{-2}ℂ[[z^{-1}]] into z^{-1}ℂ[[z^{-1}]]."""
    if not isinstance(psi, IntSeries):
        raise TypeError("op_E acts on IntSeries")
    if psi.val < 2:
        raise ValTooLow(f"op_E needs val ≥ 2, got {psi.val}")
    if psi.order < 2:
        return IntSeries(mp.zeros(psi.order, psi.prec) if psi.order else mp.zeros(1, psi.prec), psi.prec)
    frac = FracSeries(2, psi.coeffs[2:], psi.prec)
    phi = _solve_shift(frac, 1)
    coeffs = np.concatenate([mp.zeros(1, psi.prec), phi])
    return IntSeries(coeffs, psi.prec, val=psi.val - 1)


def op_E_beta(psi):
    """The inverse of S − I from offset β + 2 to offset β + 1."""
    if not isinstance(psi, FracSeries):
        raise TypeError("op_E_beta acts on FracSeries")
    with mp.working(psi.prec):
        gamma = psi.gamma - 1
    phi = _solve_shift(psi, gamma)
    return FracSeries(gamma, phi, psi.prec, val=psi.val)


def op_B_omega(psi, omega, data):
    """ψ ↦ e^{−ω b_*}·ψ(z + b) − ψ."""
    C = data.composer
    with mp.working(data.prec):
        comp = C.apply(psi)
        e1 = data.exp_minus(omega) - IntSeries.one(data.D, data.prec)
        out = mul(IntSeries(e1.coeffs, data.prec, val=2), comp) + C.apply(psi, minus_identity=True)
    return out


def op_B_alpha(phi, alpha, data):
    """φ ↦ c_α·φ(z + b) − φ, raising the offset by exactly one."""
    C = data.composer
    with mp.working(data.prec):
        comp = C.apply(phi)
        c1 = data.c_alpha(alpha) - IntSeries.one(data.D, data.prec)
        full = mul(IntSeries(c1.coeffs, data.prec, val=1), comp) + C.apply(phi, minus_identity=True)
        lead = full.coeffs[0]
        scale = max(1e-300, float(np.max(mp.absval(phi.coeffs)))) * max(1.0, abs(complex(alpha)))
        if abs(complex(lead)) > _tol(data.prec) * scale * 1e3:
            raise OrderGainViolated(f"leading coefficient {complex(lead)} did not cancel")
        gamma = phi.gamma + 1
    return FracSeries(gamma, full.coeffs[1:], data.prec, val=max(full.val - 1, 0))


def solve_phi_tilde(data):
    """The formal solution of (S − C)φ = b_* in z^{-1}ℂ[[z^{-1}]]."""
    cached = data._cache.get("phi")
    if cached is not None:
        return cached
    prec = data.prec
    bs = data.b_star
    n = min(bs.order - 1, data.composer.u_order)
    with mp.working(prec):
        L = n + 2
        A = shift_matrix(0, -1, L, prec) - data.composer.matrix(0)[:L, :L]
        phi = mp.zeros(n + 1, prec)
        for k in range(1, n + 1):
            acc = bs.coeffs[k + 1]
            if k > 1:
                acc = acc - np.dot(A[k + 1, 1:k], phi[1:k])
            phi[k] = acc / A[k + 1, k]
    out = IntSeries(phi, prec, val=1)
    data._cache["phi"] = out
    return out


def alpha_of(data, m):
    """α = −ρω for ω = 2πim."""
    with mp.working(data.prec):
        return -data.rho * mp.two_pi_i(data.prec) * m


def minimal_N(alpha):
    return max(0, math.ceil(-2 * complex(alpha).real - 1e-12))


def split_at_N(phi, alpha, N=None):
    """Split φ̃ = [φ̃]_N + {φ̃}_N; returns (head, tail, N, β)."""
    N0 = minimal_N(alpha)
    if N is None:
        N = N0
    elif N < N0:
        raise ValueError(f"N = {N} is below the admissible minimum {N0}")
    prec = phi.prec
    N = min(N, phi.order)
    head = phi.coeffs.copy()
    tail = phi.coeffs.copy()
    head[N + 1:] = 0
    tail[:N + 1] = 0
    with mp.working(prec):
        beta = mp.num(alpha, prec) + N
    return IntSeries(head, prec, val=phi.val), IntSeries(tail, prec, val=N + 1), N, beta


def compute_b_N_b_alpha(data, head, tail, alpha, N):
    """b_N = b_* − S[φ̃]_N + C[φ̃]_N and b_α = z^{−α}(1 − 1/z)^{−α} b_N."""
    prec = data.prec
    C = data.composer
    with mp.working(prec):
        if N == 0:
            b_N = data.b_star
        else:
            b_N = data.b_star - shift_minus_identity(head) + C.apply(head, minus_identity=True)
        # cross-check: b_N = S{φ̃}_N − C{φ̃}_N
        other = shift_minus_identity(tail) - C.apply(tail, minus_identity=True)
        order = min(b_N.order, other.order, head.order)
        diff = mp.absval(b_N.coeffs[:order + 1] - other.coeffs[:order + 1])
        # orders whose scale overflows a double are effectively unchecked
        with np.errstate(over="ignore"):
            size = np.maximum.accumulate(mp.absval(phi_coeffs_of(head, tail)[:order + 1])) * 2.0 ** np.arange(order + 1)
        size = np.maximum(size, mp.absval(b_N.coeffs[:order + 1]))
        bad = diff > _tol(prec) * 1e3 * np.maximum(size, 1e-300)
        if bad.any():
            n = int(np.argmax(bad))
            raise ValCheckFailed(f"b_N identity fails at order {n}: {diff[n]:.3g}")
        low = mp.absval(b_N.coeffs[:N + 2])
        if len(low) and (low > _tol(prec) * 1e3 * np.maximum(size[:len(low)], 1.0)).any():
            raise ValCheckFailed(f"b_N has val below N + 2 = {N + 2}")
        b_N = IntSeries(b_N.coeffs, prec, val=N + 2)
        a = mp.num(alpha, prec)
        n = b_N.order
        binom = mp.zeros(n + 1, prec)
        binom[0] = mp.num(1, prec)
        for i in range(1, n + 1):
            binom[i] = binom[i - 1] * (a + i - 1) / i
        g = mul(IntSeries(binom, prec, val=0), b_N)
        b_alpha = FracSeries(a + N + 2, g.coeffs[N + 2:], prec)
    return b_N, b_alpha


def phi_coeffs_of(head, tail):
    n = min(head.order, tail.order) + 1
    with mp.working(head.prec):
        return head.coeffs[:n] + tail.coeffs[:n]


@dataclass
class OmegaSetup:
    """Everything attached to one singularity ω = 2πim."""

    m: int
    omega: object
    alpha: object
    N: int
    beta: object
    phi_tilde: IntSeries
    head: IntSeries
    tail: IntSeries
    b_N: IntSeries
    b_alpha: FracSeries


def omega_setup(data, m, N=None):
    if m == 0:
        raise ValueError("m must be a nonzero integer")
    key = ("setup", m, N)
    if key in data._cache:
        return data._cache[key]
    prec = data.prec
    with mp.working(prec):
        omega = mp.two_pi_i(prec) * m
        alpha = alpha_of(data, m)
    phi = solve_phi_tilde(data)
    head, tail, N, beta = split_at_N(phi, alpha, N)
    b_N, b_alpha = compute_b_N_b_alpha(data, head, tail, alpha, N)
    out = OmegaSetup(m, omega, alpha, N, beta, phi, head, tail, b_N, b_alpha)
    data._cache[key] = out
    return out


def _cap(s, D):
    return s.truncate(D) if s.order > D else s


def psi_sequence(data, omega, k_max, D=None):
    """Ψ̃_0 = 1, Ψ̃_k = E B^ω Ψ̃_{k−1}, each kept to order at most D."""
    D = data.D if D is None else min(D, data.D)
    out = [IntSeries.one(D, data.prec)]
    for _ in range(k_max):
        out.append(_cap(op_E(op_B_omega(out[-1], omega, data)), D))
    return out


def phi_sequence_formal(data, m, k_max, N=None, D=None):
    """Φ̃_0 = E_β b_α, Φ̃_k = E_β B_α Φ̃_{k−1}, each kept to order at most D."""
    D = data.D if D is None else min(D, data.D)
    st = omega_setup(data, m, N)
    out = [_cap(op_E_beta(st.b_alpha), D)]
    for _ in range(k_max):
        out.append(_cap(op_E_beta(op_B_alpha(out[-1], st.alpha, data)), D))
    return out
