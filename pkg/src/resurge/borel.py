"""Borel transforms and functions in the Borel plane.

The Borel transform sends c·z^{-γ-n} to c·ζ^{γ+n-1}/Γ(γ+n).  Images of
integer-power series are entire functions stored by Taylor data with an
exponential-type bound; images of fractional series are a branch power
times an entire function, evaluated at lifted points of the log surface.
"""

import math
from dataclasses import dataclass

import mpmath
import numpy as np

from . import mp
from .errors import DivergentLaplace, InsufficientTerms, PoleOfGamma, PrecisionBudgetExceeded
from .quadrature import gauss_legendre

TYPE_SLACK = 1.1
GUARD_BITS = 20


def gamma_complex(s, prec):
    """Γ(s) at ``prec`` bits."""
    z = complex(s)
    if z.imag == 0 and z.real <= 0 and z.real == round(z.real):
        if mp.is_double(prec) or mp.num(s, prec) == round(z.real):
            raise PoleOfGamma(f"Γ has a pole at {z.real:g}")
    with mpmath.workprec(prec + 10):
        val = mpmath.gamma(mp.to_mpmath(mp.num(s, prec)))
    return mp.from_mpmath(val, prec)


def _rgamma_ladder(gamma, n, prec):
    """1/Γ(γ + j) for j = 0..n by the recurrence Γ(s + 1) = sΓ(s)."""
    with mp.working(prec):
        out = mp.zeros(n + 1, prec)
        g = mp.num(gamma, prec)
        zg = complex(g)
        if zg.imag == 0 and zg.real <= 0 and zg.real == round(zg.real):
            # 1/Γ vanishes at the poles; start the ladder past them
            out[:] = 0
            start = int(-round(zg.real)) + 1
            if start <= n:
                out[start] = 1 / gamma_complex(g + start, prec)
                for j in range(start + 1, n + 1):
                    out[j] = out[j - 1] / (g + j - 1)
            return out
        out[0] = 1 / gamma_complex(g, prec)
        for j in range(1, n + 1):
            out[j] = out[j - 1] / (g + j - 1)
    return out


@dataclass
class EntireFn:
    """Σ_{n ≤ T} a_n ζ^n with |a_n| ≤ C₀ R₀ⁿ / n!."""

    coeffs: np.ndarray
    type_bound: tuple
    prec: int

    @property
    def T(self):
        return len(self.coeffs) - 1

    def tail_bound(self, M):
        """Bound on |Σ_{n>T} a_n ζ^n| for |ζ| ≤ M."""
        C0, R0 = self.type_bound
        x = R0 * M
        T = self.T
        if C0 == 0:
            return 0.0
        logb = math.log(C0) + (T + 1) * math.log(x) - math.lgamma(T + 2) + x if x > 0 else -math.inf
        return math.exp(logb) if logb < 700 else math.inf

    def cancellation_bits(self, M):
        return self.type_bound[1] * M * math.log2(math.e)

    def __call__(self, zeta):
        with mp.working(self.prec):
            acc = zeta * 0 + self.coeffs[-1]
            for c in self.coeffs[-2::-1]:
                acc = acc * zeta + c
        return acc


def fit_type_bound(coeffs, R0):
    """Smallest C₀ with |a_n| ≤ C₀ R₀ⁿ / n! over the stored coefficients (R₀ gets a small slack)."""
    R = R0 * TYPE_SLACK
    a = mp.absval(coeffs)
    best = 0.0
    for n, v in enumerate(a):
        if v:
            best = max(best, math.exp(math.log(v) + math.lgamma(n + 1) - n * math.log(R)))
    return best, R


def borel_int(phi, radius=1.0):
    """Borel image of Σ_{n≥1} c_n z^{-n}: the entire function Σ c_{n+1} ζ^n / n!."""
    if phi.val < 1 and phi.coeffs[0] != 0:
        raise ValueError("borel_int needs val ≥ 1")
    prec = phi.prec
    n = phi.order - 1
    with mp.working(prec):
        fact = mp.zeros(n + 1, prec)
        f = mp.num(1, prec)
        for j in range(n + 1):
            if j:
                f = f / j
            fact[j] = f
        a = phi.coeffs[1:n + 2] * fact
    return EntireFn(a, fit_type_bound(a, radius), prec)


@dataclass
class BranchedGerm:
    """ζ^γ · H(ζ) on the Riemann surface of the logarithm."""

    gamma: object
    entire_part: EntireFn

    @property
    def prec(self):
        return self.entire_part.prec

    def __call__(self, modulus, arg):
        return eval_branched(self, (modulus, arg))


def borel_frac(phi, radius=1.0):
    """Borel image of Σ c_n z^{-γ-n}: ζ^{γ-1}·Σ c_n ζ^n / Γ(γ + n)."""
    prec = phi.prec
    rg = _rgamma_ladder(phi.gamma, phi.order, prec)
    with mp.working(prec):
        H = phi.coeffs * rg
        gamma = phi.gamma - 1
    return BranchedGerm(gamma, EntireFn(H, fit_type_bound(H, radius), prec))


def _check_tail(g, M, tol):
    bound = g.tail_bound(M)
    if tol is not None and bound > tol:
        raise InsufficientTerms(f"{g.T + 1} terms give a tail bound {bound:.3g} > {tol:.3g} at |ζ| = {M:.4g}")
    bits = g.cancellation_bits(M) + GUARD_BITS
    if bits >= g.prec:
        raise PrecisionBudgetExceeded(f"cancellation needs ≈{bits:.0f} bits, working precision is {g.prec}")
    return bound


def eval_entire(g, zeta, tol=None, with_error=False):
    """g(ζ) with the truncation tail certified to be at most ``tol``."""
    bound = _check_tail(g, abs(complex(zeta)), tol)
    val = g(mp.num(zeta, g.prec) if not isinstance(zeta, np.ndarray) else zeta)
    return (val, bound) if with_error else val


def branch_power(gamma, modulus, arg, prec):
    """ζ^γ = exp(γ(ln|ζ| + i·arg)) at a lifted point."""
    with mp.working(prec):
        lg = mp.log(mp.num(modulus, prec)) + mp.num(1j, prec) * arg
        return mp.exp(mp.num(gamma, prec) * lg)


def eval_branched(g, lifted, tol=None, with_error=False):
    """ζ^γ H(ζ) at a lifted point (modulus, lifted_arg)."""
    modulus, arg = lifted
    prec = g.prec
    H = g.entire_part
    with mp.working(prec):
        r = mp.num(modulus, prec)
        z = r * mp.exp(mp.num(1j, prec) * arg)
        bound = _check_tail(H, float(abs(r)), tol)
        h = H(z)
        p = branch_power(g.gamma, modulus, arg, prec)
        val = p * h
    if with_error:
        return val, bound * float(abs(p))
    return val


def eval_branched_array(g, z, lifts):
    """Vectorised ζ^γ H(ζ) for points z with lifted arguments ``lifts`` (backend arrays)."""
    prec = g.prec
    with mp.working(prec):
        logs = mp.log(np.array([abs(v) for v in z], dtype=object) if z.dtype == object else np.abs(z)) \
            + np.array(lifts) * mp.num(1j, prec)
        return mp.exp(logs * g.gamma) * g.entire_part(z)


def cont_b_alpha(bhat, path, s, tol=None):
    """Continuation of the branched Borel image along ``path`` to the point at parameter s."""
    prec = bhat.prec
    i, t = path.locate(s)
    with mp.working(prec):
        a = path.vertex(i, prec)
        b = path.vertex(i + 1, prec)
        L = abs(b - a)
        z = a + (b - a) * (mp.real(t, prec) / L)
        arg = path.lift_of(i, z) if complex(a) != 0 else mp.real(path.lifts[0], prec)
        return eval_branched(bhat, (abs(z), arg), tol)


def cont_at_vertex(bhat, path, i, tol=None):
    """Continuation at vertex i (the end of segment i − 1)."""
    prec = bhat.prec
    with mp.working(prec):
        z = path.vertex(i, prec)
        arg = path.lift_of(i - 1, z) if i > 0 else mp.real(path.lifts[0], prec)
        return eval_branched(bhat, (abs(z), arg), tol)


def laplace_ray(g, theta, z, tol=1e-20, panel=1.0, nodes=24):
    """∫_0^{e^{iθ}∞} e^{−zζ} g(ζ) dζ for an EntireFn or BranchedGerm g.

    The first unit of the ray is integrated term by term against the
    Taylor data (exact for the branch power), the rest by composite
    Gauss–Legendre up to a cut-off beyond which the exponential tail bound
    is below ``tol``.
    """
    if isinstance(g, EntireFn):
        g = BranchedGerm(0, g)
    H = g.entire_part
    prec = H.prec
    C0, R0 = H.type_bound
    zc = complex(z)
    margin = (zc * complex(math.cos(theta), math.sin(theta))).real - R0
    if margin <= 0.5:
        raise DivergentLaplace(f"Re(z e^(iθ)) must exceed the type {R0:.3g} with margin; got margin {margin:.3g}")
    gre = complex(g.gamma).real
    with mp.working(prec):
        zz = mp.num(z, prec)
        u = mp.exp(mp.num(1j, prec) * theta)
        gam = mp.num(g.gamma, prec)
        # [0, a]: expand e^{−z u t} H(u t) in t and integrate t^{γ+n} termwise
        a = mp.real(min(panel, 1.0), prec)
        # enough terms of e^{−zut} as well as of H on [0, a]
        x = abs(zc) * float(a)
        T = H.T
        while math.lgamma(T + 2) - (T + 1) * math.log(max(x, 1e-300)) < -math.log(tol) + 3:
            T += 1
        Hc = np.concatenate([H.coeffs, mp.zeros(T - H.T, prec)]) if T > H.T else H.coeffs
        Ht = Hc * np.array([u ** n for n in range(T + 1)], dtype=object if Hc.dtype == object else complex)
        ex = mp.zeros(T + 1, prec)
        ex[0] = mp.num(1, prec)
        for n in range(1, T + 1):
            ex[n] = ex[n - 1] * (-zz * u) / n
        prod = np.convolve(Ht, ex)[:T + 1]
        acc = 0
        for n in range(T + 1):
            e = gam + n + 1
            acc = acc + prod[n] * mp.exp(e * mp.log(a)) / e
        head = acc * mp.exp(gam * mp.num(1j, prec) * theta) * u
        # [a, L]: composite Gauss–Legendre
        # |integrand| ≤ C₀ t^{Re γ} e^{−margin·t}; choose L so the neglected part is below tol
        L = float(a) + 1.0
        for _ in range(200):
            logtail = math.log(max(C0, 1e-300)) + max(gre, 0) * math.log(L) - margin * L - math.log(margin)
            if logtail < math.log(tol):
                break
            L += 0.25
        _check_tail(H, L, None)
        # truncation of H, damped by the exponential, integrated over [0, L]
        decay = margin + R0
        worst = max(H.tail_bound(t) * math.exp(-decay * t) * t ** gre
                    for t in np.linspace(L / 64, L, 64))
        if worst * L > tol:
            raise InsufficientTerms(f"Taylor data too short to reach |ζ| = {L:.3g} along the ray")
        x, w = gauss_legendre(nodes, prec)
        tail = 0
        npan = max(1, math.ceil((L - float(a)) / panel))
        h = (mp.real(L, prec) - a) / npan
        for p in range(npan):
            t = a + h * p + (x + 1) * (h / 2)
            zeta = t * u
            logt = mp.log(t)
            f = mp.exp(-zz * zeta) * mp.exp((logt + mp.num(1j, prec) * theta) * gam) * H(zeta)
            tail = tail + (w * f).sum() * (h / 2)
        tail = tail * u
        return head + tail
