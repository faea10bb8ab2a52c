"""Quadrature rules at arbitrary precision.

Gauss–Legendre nodes are seeded from numpy and polished by Newton steps in
gmpy2.  Spectral integration matrices give the running integrals
∫_{-1}^{x_i} p(x) dx of the interpolant through the nodes; the product
rule integrates s^β·p(s) over [0, s_i] exactly for polynomial p.
"""

from functools import lru_cache

import gmpy2
import numpy as np

from . import mp


def _legendre_all(x, n):
    """P_0..P_n at the points x (backend arrays); returns a list of arrays."""
    P = [x * 0 + 1, x]
    for j in range(1, n):
        P.append(((2 * j + 1) * x * P[j] - j * P[j - 1]) / (j + 1))
    return P[:n + 1]


@lru_cache(maxsize=None)
def gauss_legendre(n, prec):
    """Nodes (ascending) and weights on [−1, 1] as complex backend arrays."""
    x0, w0 = np.polynomial.legendre.leggauss(n)
    if mp.is_double(prec):
        return x0.astype(complex), w0.astype(complex)
    with mp.working(prec + 20):
        xs, ws = [], []
        for t in x0:
            x = gmpy2.mpfr(float(t))
            for _ in range(100):
                p0, p1 = gmpy2.mpfr(1), x
                for j in range(1, n):
                    p0, p1 = p1, ((2 * j + 1) * x * p1 - j * p0) / (j + 1)
                dp = n * (x * p1 - p0) / (x * x - 1)
                dx = p1 / dp
                x -= dx
                if abs(dx) < gmpy2.mpfr(2) ** (-prec - 10):
                    break
            p0, p1 = gmpy2.mpfr(1), x
            for j in range(1, n):
                p0, p1 = p1, ((2 * j + 1) * x * p1 - j * p0) / (j + 1)
            dp = n * (x * p1 - p0) / (x * x - 1)
            xs.append(x)
            ws.append(2 / ((1 - x * x) * dp * dp))
    with mp.working(prec):
        return mp.array(xs, prec), mp.array(ws, prec)


@lru_cache(maxsize=None)
def spectral_integration(n, prec):
    """SI with SI[i, l] = ∫_{-1}^{x_i} ℓ_l(x) dx for the Gauss–Legendre Lagrange basis ℓ_l."""
    x, w = gauss_legendre(n, prec)
    with mp.working(prec):
        P = _legendre_all(x, n)
        # ℓ_l = Σ_j (2j+1)/2 · w_l P_j(x_l) P_j, and ∫_{-1}^x P_j = (P_{j+1} − P_{j-1})/(2j+1)
        SI = mp.zeros((n, n), prec)
        SI = SI + np.outer(x + 1, w) / 2
        for j in range(1, n):
            SI = SI + np.outer((P[j + 1] - P[j - 1]) / 2, w * P[j])
    return SI


def _real_key(beta, prec):
    return tuple(mp.to_pair(mp.num(beta, prec), prec))


def product_integration(n, beta, prec):
    """Nodes s_l on (0, 1) and W of shape (n + 1, n) with W[i, l] = ∫_0^{s_i} s^β ℓ_l(s) ds.

    The last row holds the integrals over the whole of [0, 1].  Requires Re β > −1.
    """
    return _product_integration(n, _real_key(beta, prec), prec)


@lru_cache(maxsize=None)
def _product_integration(n, beta_key, prec):
    work = prec + 4 * n + 40
    x, _ = gauss_legendre(n, work if not mp.is_double(prec) else 2 * mp.DOUBLE + 4 * n + 40)
    with mp.working(work):
        beta = mp.from_pair(list(beta_key), work)
        s = (mp.convert(x, work) + 1) / 2
        V = mp.zeros((n, n), work)
        for k in range(n):
            V[:, k] = s ** k
        C = mp.solve(V, np.eye(n, dtype=int).astype(object) * gmpy2.mpc(1))  # C[k, l]: coefficient of s^k in ℓ_l
        targets = np.concatenate([s, mp.array([1], work)])
        logt = mp.log(targets)
        M = mp.zeros((n + 1, n), work)
        for k in range(n):
            e = beta + k + 1
            M[:, k] = mp.exp(logt * e) / e
        W = M @ C
    return mp.convert(s, prec), mp.convert(W, prec)
