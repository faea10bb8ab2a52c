"""The Volterra kernel K_α(ξ, ζ) = u_0(ζ − ξ) + Σ_{k≥1} (−ξ)^k/k! · u_k(ζ − ξ).

Here u_0 = 𝓑(c_α − 1) and u_k = 𝓑(c_α b^k), so one coefficient table
serves the whole kernel.  For dense evaluation on a grid the kernel is
re-expanded as a double power series around a centre c,
K = Σ κ_{ac} (ζ − c)^a (ξ − c)^c, which turns the grid evaluation into
two matrix products.
"""

import math
from dataclasses import dataclass, field

import flint
import numpy as np

from . import mp
from .borel import borel_int, fit_type_bound
from .errors import InsufficientTerms
from .fixed import FixedCMat, cmul, to_fixed
from .series import IntSeries, mul


@dataclass
class KernelTable:
    U: np.ndarray
    alpha: object
    rho: object
    prec: int
    row_bounds: list
    tail: float = 0.0
    _joint: dict = field(default_factory=dict, repr=False)

    @property
    def Kmax(self):
        return self.U.shape[0] - 1

    @property
    def T(self):
        return self.U.shape[1] - 1

    def __call__(self, xi, zeta):
        """K(ξ, ζ) by direct summation (reference evaluation)."""
        prec = self.prec
        with mp.working(prec):
            xi = mp.num(xi, prec)
            zeta = mp.num(zeta, prec)
            w = mp.num(1, prec)
            v = self.U[0].copy()
            for k in range(1, self.Kmax + 1):
                w = w * (-xi) / k
                v = v + self.U[k] * w
            t = zeta - xi
            acc = v[-1]
            for c in v[-2::-1]:
                acc = acc * t + c
        return acc

    @property
    def is_zero(self):
        """True when every stored coefficient vanishes (e.g. b = 0 and α = 0)."""
        return self.tail == 0 and not any(v != 0 for v in self.U.reshape(-1))

    def state(self):
        return {"U": self.U, "alpha": self.alpha, "rho": self.rho, "prec": self.prec,
                "row_bounds": self.row_bounds, "tail": self.tail}

    @classmethod
    def from_state(cls, st):
        return cls(st["U"], st["alpha"], st["rho"], st["prec"], st["row_bounds"], st["tail"])

    def tail_bound(self, M_xi, M_t):
        """Bound on the truncation error (in n and in k) for |ξ| ≤ M_xi, |ζ − ξ| ≤ M_t."""
        total = self.tail
        T = self.T
        for k, (C, R) in enumerate(self.row_bounds):
            if C == 0:
                continue
            x = R * M_t
            logb = math.log(C) + (T + 1) * math.log(max(x, 1e-300)) - math.lgamma(T + 2) + x
            logb += k * math.log(max(M_xi, 1e-300)) - math.lgamma(k + 1)
            total += math.exp(min(logb, 700))
        return total

    def joint(self, center):
        """κ with K(ξ, ζ) = Σ κ[a, c] (ζ − center)^a (ξ − center)^c, as an acb_mat."""
        key = mp.to_pair(center, self.prec) if not mp.is_double(self.prec) else complex(center)
        key = str(key)
        if key in self._joint:
            return self._joint[key]
        with mp.flint_working(self.prec):
            out = self._joint_at(center)
        self._joint[key] = out
        return out

    def _joint_at(self, center):
        T, Km = self.T, self.Kmax
        c0 = mp.to_acb(center)
        # P[k, j]: coefficient of y^j in (−(c0 + y))^k / k!
        P = np.empty((Km + 1, Km + 1), dtype=object)
        P[:] = flint.acb(0)
        for k in range(Km + 1):
            fk = flint.arb.fac_ui(k)
            for j in range(k + 1):
                P[k, j] = (-1) ** k * flint.arb.bin_uiui(k, j) * c0 ** (k - j) / fk
        Ut = mp.acb_matrix(self.U.T)
        Q = Ut * flint.acb_mat(Km + 1, Km + 1, list(P.reshape(-1)))
        Qn = np.array(Q.entries(), dtype=object).reshape(T + 1, Km + 1)
        kappa = np.empty((T + 1, T + Km + 1), dtype=object)
        kappa[:] = flint.acb(0)
        for d in range(T + 1):
            a = np.arange(T + 1 - d)
            coef = np.array([flint.arb.bin_uiui(int(ai) + d, d) * (-1) ** d for ai in a], dtype=object)
            kappa[:T + 1 - d, d:d + Km + 1] += coef[:, None] * Qn[d:, :]
        return flint.acb_mat(T + 1, T + Km + 1, list(kappa.reshape(-1)))

    def majorant_bits(self, center, r_target, r_source):
        """log₂ of Σ|κ_{ac}| r_t^a r_s^c, the scale of cancellation in the joint evaluation."""
        kap = self.joint(center)
        best = -math.inf
        terms = []
        la = math.log(max(r_target, 1e-300))
        lc = math.log(max(r_source, 1e-300))
        for a in range(kap.nrows()):
            for c in range(kap.ncols()):
                v = abs(complex(kap[a, c]))
                if v:
                    terms.append(math.log(v) + a * la + c * lc)
        if terms:
            best = max(terms)
            best = best + math.log(sum(math.exp(t - best) for t in terms))
        return best / math.log(2) if terms else -math.inf

    def matrix(self, targets, sources, center, shift, col_scale=None):
        """FixedCMat with entries K(sources[l], targets[i])·col_scale[l] at ``shift``.

        ``targets`` and ``sources`` are backend scalars; ``center`` should sit
        near the middle of the points so the power tables stay bounded.
        """
        prec = self.prec
        kap = self.joint(center)
        with mp.working(prec), mp.flint_working(prec):
            c0 = mp.num(center, prec)
            r = max(abs(complex(z) - complex(center)) for z in list(targets) + list(sources)) * 1.0001 + 1e-30
            rr = mp.real(r, prec)
            X = _power_table([(z - c0) / rr for z in targets], kap.nrows(), shift)
            scales = col_scale if col_scale is not None else [None] * len(sources)
            Y = _power_table([(z - c0) / rr for z in sources], kap.ncols(), shift, scales)
            ra = flint.arb(mp.fmt_real(mp.real(r, prec), prec) if not mp.is_double(prec) else repr(r))
            vals = []
            top = 0.0
            for a in range(kap.nrows()):
                for c in range(kap.ncols()):
                    v = kap[a, c] * ra ** (a + c)
                    vals.append(v)
                    top = max(top, abs(complex(v)))
            e = math.ceil(math.log2(top)) if top > 0 else 0
            two_e = flint.arb(2) ** (-e)
            kt = FixedCMat.from_values(kap.nrows(), kap.ncols(), [v * two_e for v in vals], shift)
        Z = (kt @ Y.transpose()).rescale(shift)
        out = X @ Z
        # undo the 2^-e normalisation of κ and the scale of Y's column factors
        out.shift -= e + Y.extra
        return out.rescale(shift)


def _power_table(points, n, shift, scales=None):
    """FixedCMat with rows s_i·(p_i^0, …, p_i^{n−1}); |p_i| ≤ 1.

    When row factors s_i are given they are normalised by a common power of
    two, recorded in ``extra`` (value = ints·2^{−shift+extra})."""
    extra = 0
    if scales is not None and scales[0] is not None:
        top = max(abs(complex(v)) for v in scales)
        extra = math.ceil(math.log2(top)) if top > 0 else 0
    re, im = [], []
    for i, p in enumerate(points):
        x = to_fixed(p, shift)
        if scales is not None and scales[i] is not None:
            v = to_fixed(scales[i], shift - extra)
        else:
            v = (1 << shift, 0)
        for _ in range(n):
            re.append(v[0])
            im.append(v[1])
            v = cmul(v, x, shift)
    out = FixedCMat.from_pairs(len(points), n, re, im, shift)
    out.extra = extra
    return out


def build_kernel(data, alpha, M_xi, M_t, tol=1e-30, k_cap=400, cache=None):
    """Kernel table for c_α and b, with K_max chosen from the k-tail at |ξ| ≤ M_xi, |ζ−ξ| ≤ M_t."""
    prec = data.prec
    key = None
    if cache is not None:
        key = cache.key(data.spec.digest(), mp.to_pair(alpha, prec), data.D, prec, M_xi, M_t, tol)
        st = cache.get(key)
        if st is not None:
            return KernelTable.from_state(st)
    D = data.D
    R = data.radius_r
    with mp.working(prec):
        ca = data.c_alpha(alpha)
        c1 = IntSeries(ca.coeffs[:D + 1] - IntSeries.one(D, prec).coeffs, prec, val=1)
        rows = []
        bounds = []
        u0 = borel_int(c1.truncate(D), R)
        rows.append(u0.coeffs[:D])
        bounds.append(u0.type_bound)
        bk = IntSeries.one(D, prec)
        b = data.b.truncate(D)
        terms = []
        tail = math.inf
        for k in range(1, k_cap + 1):
            bk = mul(bk, b)
            if bk.order > D:
                bk = bk.truncate(D)
            prod = mul(ca.truncate(D), bk)
            if prod.order > D:
                prod = prod.truncate(D)
            u = borel_int(prod, R)
            coeffs = mp.zeros(D, prec)
            coeffs[:len(u.coeffs)] = u.coeffs[:D]
            rows.append(coeffs)
            bounds.append(u.type_bound)
            C, Rk = u.type_bound
            lt = (math.log(C) if C else -math.inf) + Rk * M_t + k * math.log(max(M_xi, 1e-300)) - math.lgamma(k + 1)
            terms.append(lt)
            if len(terms) >= 3 and all(t == -math.inf for t in terms[-3:]):
                tail = 0.0
                break
            if len(terms) >= 2 and terms[-1] < math.log(tol) and terms[-1] - terms[-2] < -math.log(2):
                q = math.exp(terms[-1] - terms[-2])
                tail = math.exp(terms[-1]) * q / (1 - q)
                break
        else:
            raise InsufficientTerms(f"kernel k-series did not converge within {k_cap} terms")
    U = np.array(rows, dtype=object if not mp.is_double(prec) else complex)
    table = KernelTable(U, alpha, data.rho, prec, bounds, tail)
    bound = table.tail_bound(M_xi, M_t)
    if bound > tol:
        raise InsufficientTerms(f"kernel truncation bound {bound:.3g} exceeds {tol:.3g}; raise the depth D")
    if cache is not None:
        cache.put(key, table.state())
    return table
