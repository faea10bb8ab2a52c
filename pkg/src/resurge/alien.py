"""Residua of the alien operator by Volterra recursion along Γ̃.

With G_0 = cont b̂_α and

    G_j(s) = ∫_0^s G_{j−1}(σ) K_α(Γ̃(σ), Γ̃(s)) / (e^{Γ̃(σ)} − 1) dΓ̃(σ),

the residua are S_{ω,j} = 2πi·G_j(ω) and (e^ζ − 1)·cont Φ̂_j(ζ) = G_j(ζ).
One kernel matrix on the grid serves every level; the whole Neumann series
Σ_j G_j is obtained by block forward substitution.
"""

import cmath
import math
from dataclasses import dataclass, field, replace

import flint
import numpy as np

from . import fixed, mp
from .borel import _check_tail, borel_frac, borel_int
from .errors import (ConvergenceNotDetected, EndpointOnLattice, InsufficientTerms, LoopTooClose,
                     PrecisionBudgetExceeded, TailNotBounded)
from .formal import alpha_of, omega_setup, psi_sequence
from .grid import GridConfig, build_grid
from .kernel import build_kernel
from .paths import TWO_PI, direct_path, gamma_tilde, lattice_index, loop_path, polyline, segment_gamma_m

MAX_DEPTH = 800


@dataclass(frozen=True)
class AlienConfig:
    grid: GridConfig = GridConfig()
    guard_bits: int = 64
    companion: float = 0.7
    estimate_errors: bool = True
    cache: object = field(default=None, compare=False, repr=False)


@dataclass
class ResiduaResult:
    S: list
    partial_sums: list
    total: object
    errors: list
    total_error: float
    lambda_fit: float
    envelope_C: float
    tail_error: float
    A: object
    horn: str
    meta: dict = field(default_factory=dict)

    def to_json(self, prec):
        pair = lambda v: mp.to_pair(v, prec)  # noqa: E731
        return {
            "S": [pair(v) for v in self.S],
            "partial_sums": [pair(v) for v in self.partial_sums],
            "total": pair(self.total),
            "errors": list(self.errors),
            "total_error": self.total_error,
            "lambda_fit": self.lambda_fit,
            "envelope_C": self.envelope_C,
            "tail_error": self.tail_error,
            "A": pair(self.A),
            "horn": self.horn,
            "meta": self.meta,
        }


@dataclass
class VariationReport:
    k: int
    zeta0: complex
    var_measured: object
    var_predicted: object
    rel_error: float
    abs_error: float


# ------------------------------------------------------------------ precision and depth

def _depth_for(R, M, bits):
    """Smallest T with C·(RM)^{T+1}/(T+1)!·e^{RM} below 2^-bits for C = 1."""
    x = R * M
    target = -bits * math.log(2) - 10
    T = max(8, int(x))
    while math.log(max(x, 1e-300)) * (T + 1) - math.lgamma(T + 2) + x > target:
        T += 1
    return T


def _diameter(points):
    pts = [complex(p) for p in points]
    return max(abs(a - b) for a in pts for b in pts)


class VolterraSystem:
    """Grid, kernel and discretised Volterra operator for one (germ, m, path)."""

    def __init__(self, data, m, path, cfg=None, N=None, target_bits=None):
        self.cfg = cfg or AlienConfig()
        self.m = m
        self.path = path
        self.user_prec = data.prec
        bits = target_bits or max(data.prec, 60)
        guard = self.cfg.guard_bits
        for _attempt in range(3):
            self.work = data.prec + guard
            try:
                self._build(data, N, bits)
                lost = self.kernel_bits_lost
                if lost + 24 <= guard:
                    return
                guard = int(lost) + 40
            except PrecisionBudgetExceeded:
                guard *= 2
        raise PrecisionBudgetExceeded(f"kernel evaluation loses about {self.kernel_bits_lost:.0f} bits")

    def _build(self, data, N, bits):
        path = self.path
        verts = list(path.vertices)
        M_t = _diameter(verts) * 1.01 + 1e-9
        M_xi = max(abs(v) for v in verts) * 1.01 + 1e-9
        R = data.radius_r * 1.1
        D = max(data.D, _depth_for(R, M_t + M_xi, self.work) + 4)
        d = data
        if d.prec != self.work or d.D != D:
            d = d.with_precision(self.work)
            d = d.with_depth(D) if d.D != D else d
        while True:
            try:
                with mp.working(self.work):
                    self.setup = omega_setup(d, self.m, N)
                    self.kernel = build_kernel(d, self.setup.alpha, M_xi, M_t, tol=2.0 ** -(bits + 20),
                                               cache=self.cfg.cache)
                    self.bhat = borel_frac(self.setup.b_alpha, d.radius_r)
                break
            except InsufficientTerms:
                if D >= MAX_DEPTH:
                    raise
                D = min(MAX_DEPTH, int(D * 1.3) + 8)
                d = d.with_depth(D)
        self.data = d
        self.beta = self.setup.beta
        self.grid = build_grid(path, self.beta, self.cfg.grid, self.work)
        self._operator(M_xi, M_t)

    # -------------------------------------------------------------- discretisation

    def _operator(self, M_xi, M_t):
        g = self.grid
        prec = self.work
        F = self.shift = prec
        n = g.n
        with mp.working(prec), mp.flint_working(prec):
            zs = [complex(z) for z in g.zeta]
            center = complex((max(z.real for z in zs) + min(z.real for z in zs)) / 2,
                             (max(z.imag for z in zs) + min(z.imag for z in zs)) / 2)
            c0 = mp.num(center, prec)
            r = max(abs(z - center) for z in zs + [complex(g.end)])
            if self.kernel.is_zero:
                # nothing to integrate: every level past the first vanishes
                self.kernel_bits_lost = -math.inf
                self.K_end_end = self.kernel(g.end, g.end)
                self.A = fixed.FixedCMat.from_pairs(n + 1, n, [0] * ((n + 1) * n), [0] * ((n + 1) * n), F)
                self.diag = [[flint.acb(0)] * (pan.n * pan.n) for pan in g.panels]
                self.G0 = [fixed.to_fixed(v, F) for v in self._g0()]
                self.G0_end = fixed.to_fixed(self._g0_at(g.end, g.end_lift), F)
                return
            self.kernel_bits_lost = self.kernel.majorant_bits(c0, r, r)
            inv_e = g.inv_expm1()
            full = [None] * n
            for pan in g.panels:
                for j in range(pan.n):
                    full[pan.start + j] = pan.full[j]
            scaled = [full[l] * inv_e[l] for l in range(n)]
            K = self.kernel.matrix(list(g.zeta) + [g.end], list(g.zeta), c0, F, scaled)
            self.K_end_end = self.kernel(g.end, g.end)
            re, im = K.pairs()
            # rows of panel p see earlier panels with the full weights, their own
            # panel with the running-integral weights and nothing later
            for pan in g.panels:
                ratio = [[fixed.to_fixed(pan.partial[r_][j] / pan.full[j], F) for j in range(pan.n)]
                         for r_ in range(pan.n)]
                for r_ in range(pan.n):
                    base = (pan.start + r_) * n
                    for j in range(pan.n):
                        q = base + pan.start + j
                        re[q], im[q] = fixed.cmul((re[q], im[q]), ratio[r_][j], F)
                    for q in range(base + pan.stop, base + n):
                        re[q] = 0
                        im[q] = 0
            self.A = fixed.FixedCMat.from_pairs(n + 1, n, re, im, F)
            self.diag = []
            for pan in g.panels:
                s0 = pan.start
                self.diag.append([fixed.fixed_to_acb(re[(s0 + i) * n + s0 + j], im[(s0 + i) * n + s0 + j], F)
                                  for i in range(pan.n) for j in range(pan.n)])
            self.G0 = [fixed.to_fixed(v, F) for v in self._g0()]
            self.G0_end = fixed.to_fixed(self._g0_at(g.end, g.end_lift), F)

    def _g0_at(self, z, lift):
        with mp.working(self.work):
            return mp.to_acb(self.bhat(abs(z), lift))

    def _g0(self):
        g = self.grid
        H = [mp.to_acb(c) for c in self.bhat.entire_part.coeffs]
        M = max(abs(complex(z)) for z in g.zeta)
        _check_tail(self.bhat.entire_part, M, 2.0 ** -(self.work - 8) * max(1.0, self.bhat.entire_part.type_bound[0]))
        gam = mp.to_acb(self.bhat.gamma)
        out = []
        for z, lift in zip(g.zeta, g.lifts):
            za = mp.to_acb(z)
            acc = H[-1]
            for c in H[-2::-1]:
                acc = acc * za + c
            lg = flint.acb(mp.to_acb(abs(z)).real.log(), mp.to_acb(lift).real)
            out.append((gam * lg).exp() * acc)
        return out

    # -------------------------------------------------------------- levels

    def _matvec(self, G):
        n = len(G)
        col = fixed.FixedCMat.from_pairs(n, 1, [v[0] for v in G], [v[1] for v in G], self.shift)
        re, im = (self.A @ col).rescale(self.shift).pairs()
        return list(zip(re, im))

    def apply(self, G):
        """One Volterra step: values at the nodes and at the end point."""
        out = self._matvec(G)
        return out[:-1], out[-1]

    def levels(self, k_max):
        """[(G_j at nodes, G_j at the end)] for j = 0..k_max, as fixed-point pairs."""
        out = [(self.G0, self.G0_end)]
        G = self.G0
        for _ in range(k_max):
            G, e = self.apply(G)
            out.append((G, e))
        return out

    def resolvent(self):
        """Σ_j G_j at the nodes and the end: solves (I − A)G = G_0 panel by panel."""
        F = self.shift
        n = self.grid.n
        G = [(0, 0)] * n
        with mp.flint_working(self.work):
            for pan, dg in zip(self.grid.panels, self.diag):
                c, s0 = pan.n, pan.start
                known = self._matvec(G) if s0 else None
                rhs = []
                for i in range(c):
                    v = self.G0[s0 + i]
                    if known is not None:
                        v = (v[0] + known[s0 + i][0], v[1] + known[s0 + i][1])
                    rhs.append(fixed.fixed_to_acb(v[0], v[1], F))
                M = flint.acb_mat(c, c, [(1 if i == j else 0) - dg[i * c + j] for i in range(c) for j in range(c)])
                x = M.solve(flint.acb_mat(c, 1, rhs), nonstop=True, algorithm="approx")
                for i in range(c):
                    G[s0 + i] = fixed.to_fixed(x[i, 0], F)
            full = self._matvec(G)
        end = (self.G0_end[0] + full[-1][0], self.G0_end[1] + full[-1][1])
        return G, end

    def value(self, pair):
        """Fixed-point pair → backend scalar at the working precision."""
        return fixed.from_fixed(pair[0], pair[1], self.shift, self.work)


# ------------------------------------------------------------------ residua

def _fit_lambda(S, k_max):
    """Geometric ratio Λ and envelope constant C fitted on the last half of the terms.

    Λ is the least-squares slope of log|S_k|; C is the smallest constant
    putting the fitted terms under C·Λ^k.  Earlier terms are not used, so
    whether they also lie under the envelope is a genuine check.
    """
    mags = [(k, abs(complex(s))) for k, s in enumerate(S)]
    pts = [(k, math.log(a)) for k, a in mags if a > 0]
    if len(pts) < 3:
        return 0.0, max([a for _, a in mags] + [0.0])
    take = max(3, k_max // 2)
    pts = pts[-take:]
    ks = np.array([p[0] for p in pts], float)
    ls = np.array([p[1] for p in pts], float)
    slope, icpt = np.polyfit(ks, ls, 1)
    resid = ls - (icpt + slope * ks)
    return math.exp(slope), math.exp(icpt + float(resid.max()))


def outside_envelope(res, k_upto=None):
    """Indices k ≤ k_upto with |S_k| > C·Λ^k."""
    k_upto = len(res.S) - 1 if k_upto is None else k_upto
    C, lam = res.envelope_C, res.lambda_fit
    out = []
    for k in range(min(k_upto, len(res.S) - 1) + 1):
        a = abs(complex(res.S[k]))
        if a > C * lam ** k * (1 + 1e-9) + 1e-300:
            out.append(k)
    return out


def ev_invariant(total, m, rho, prec):
    """A_{−m} from S^{Γ_m}_{2πim}: S·e^{−4π²mρ} for m > 0, −S for m < 0."""
    with mp.working(prec):
        if m > 0:
            return total * mp.exp(-4 * mp.pi(prec) ** 2 * m * mp.num(rho, prec)), "low"
        return -total, "up"


def _noise_floor(system, scale):
    return scale * 2.0 ** (-(system.work - system.kernel_bits_lost - 16))


def residua(data, m, gamma=None, k_max=12, cfg=None, N=None):
    """Residua S_{ω,0..k_max} along Γ̃ for ω = 2πim, their sum and the invariant A_{−m}."""
    cfg = cfg or AlienConfig()
    if m == 0:
        raise ValueError("m must be a nonzero integer")
    gamma = gamma or segment_gamma_m(m)
    prec = data.prec
    with mp.working(prec):
        omega = mp.two_pi_i(prec) * m
    path = gamma_tilde(gamma, complex(omega))
    sysm = VolterraSystem(data, m, path, cfg, N)
    lv = sysm.levels(k_max)
    _, tot_end = sysm.resolvent()
    with mp.working(sysm.work):
        tpi = mp.two_pi_i(sysm.work)
        S_w = [tpi * sysm.value(e) for _, e in lv]
        total_w = tpi * sysm.value(tot_end)
    S = [mp.num(v, prec) if not mp.is_double(prec) else complex(v) for v in S_w]
    total = mp.num(total_w, prec) if not mp.is_double(prec) else complex(total_w)
    errors = [0.0] * len(S)
    total_err = 0.0
    scale = max([abs(complex(s)) for s in S] + [abs(complex(total))])
    floor = _noise_floor(sysm, max(scale, 1e-300))
    meta = {"m": m, "omega": mp.to_pair(omega, prec), "alpha": mp.to_pair(sysm.setup.alpha, prec),
            "beta": mp.to_pair(sysm.beta, prec), "N": sysm.setup.N, "precision": prec,
            "working_precision": sysm.work, "depth": sysm.data.D, "kernel_Kmax": sysm.kernel.Kmax,
            "kernel_bits_lost": round(sysm.kernel_bits_lost, 1) if math.isfinite(sysm.kernel_bits_lost) else None, "grid": sysm.grid.stats(),
            "K_end_end": abs(complex(sysm.K_end_end))}
    if cfg.estimate_errors:
        coarse_cfg = replace(cfg, grid=cfg.grid.scaled(cfg.companion), estimate_errors=False)
        comp = VolterraSystem(sysm.data, m, path, coarse_cfg, N, target_bits=prec)
        lvc = comp.levels(k_max)
        _, tot_c = comp.resolvent()
        with mp.working(sysm.work):
            errors = [abs(complex(tpi * comp.value(e) - S_w[k])) + floor for k, (_, e) in enumerate(lvc)]
            total_err = abs(complex(tpi * comp.value(tot_c) - total_w)) + floor
        meta["companion_grid"] = comp.grid.stats()
    else:
        errors = [floor] * len(S)
        total_err = floor
    partial = []
    with mp.working(prec):
        acc = mp.num(0, prec)
        for s in S:
            acc = acc + s
            partial.append(acc)
    lam, C = _fit_lambda(S, k_max)
    tail = C * lam ** (k_max + 1) / (1 - lam) if lam < 1 else math.inf
    A, horn = ev_invariant(total, m, sysm.data.rho, prec)
    res = ResiduaResult(S, partial, total, errors, total_err, lam, C, tail, A, horn, meta)
    if k_max >= 3 and lam >= 1:
        exc = ConvergenceNotDetected(f"fitted ratio Λ = {lam:.3g} is not below 1")
        exc.result = res
        raise exc
    return res


def sum_residua(res, tol=None):
    """Σ_k S_k with the geometric tail bound C·Λ^{k_max+1}/(1 − Λ).

    The partial sum is returned when the tail bound is below ``tol``;
    ``TailNotBounded`` is raised otherwise (or when Λ ≥ 1).
    """
    S = res.S
    if all(abs(complex(s)) == 0 for s in S):
        return S[0] * 0
    if res.lambda_fit >= 1:
        raise TailNotBounded(f"fitted ratio Λ = {res.lambda_fit:.3g} is not below 1")
    total = res.partial_sums[-1]
    mag = abs(complex(total))
    if tol is not None and res.tail_error > tol * max(mag, 1e-300):
        # two consecutive negligible terms also end the sum
        if not (len(S) >= 2 and all(abs(complex(s)) < tol * mag for s in S[-2:])):
            raise TailNotBounded(f"tail bound {res.tail_error:.3g} exceeds {tol:.3g}·|S|")
    return total


def check_decay(res, k_upto=None):
    """Raise ConvergenceNotDetected unless Λ < 1 and every |S_k| lies in the envelope."""
    if res.lambda_fit >= 1:
        raise ConvergenceNotDetected(f"fitted Λ = {res.lambda_fit:.3g}")
    bad = outside_envelope(res, k_upto)
    if bad:
        raise ConvergenceNotDetected(f"|S_k| above the envelope C·Λ^k for k = {bad}")
    return True


# ------------------------------------------------------------------ continuation

def cont_phi_k(data, path, k_max, m=1, cfg=None, N=None, system=None):
    """cont_γ Φ̂_k at the end of ``path`` for k = 0..k_max (γ issues from 0, avoids 2πiℤ).

    Φ̂_k are the Borel images attached to ω = 2πim (they depend on m
    through α).
    """
    end = complex(path.end)
    k_near = round(end.imag / TWO_PI)
    if abs(end - complex(0, TWO_PI * k_near)) < 1e-12:
        raise EndpointOnLattice(f"path ends on the lattice point {end}")
    sysm = system or VolterraSystem(data, m, path, cfg, N)
    lv = sysm.levels(k_max)
    prec = data.prec
    with mp.working(sysm.work):
        inv = 1 / mp.expm1(sysm.grid.end - mp.two_pi_i(sysm.work) * k_near)
        vals = [sysm.value(e) * inv for _, e in lv]
    with mp.working(prec):
        vals = [mp.num(v, prec) if not mp.is_double(prec) else complex(v) for v in vals]
    return vals, sysm


def _psi_hat_values(data, omega, k_max, zeta0):
    """Ψ̂_k(ζ0) for k = 1..k_max by Taylor evaluation of 𝓑Ψ̃_k."""
    psis = psi_sequence(data, omega, k_max)
    out = [None]
    for k in range(1, k_max + 1):
        g = borel_int(psis[k], data.radius_r)
        with mp.working(data.prec):
            out.append(g(mp.num(zeta0, data.prec)))
    return out


def variation_at(data, m, k_max, zeta0, gamma=None, cfg=None, N=None):
    """Measured monodromy of cont Φ̂_k at ω + ζ0 for k = 0..k_max.

    The loop path follows Γ̃ to ω + ζ0 and then once around ω
    counterclockwise; the direct path stops at ω + ζ0.
    """
    gamma = gamma or segment_gamma_m(m)
    omega = complex(0, TWO_PI * m)
    r = abs(complex(zeta0))
    if r < 2.0 ** -(cfg.grid.depth if cfg else GridConfig().depth) * 1e3:
        raise LoopTooClose(f"loop radius {r:.3g} is below the quadrature resolution")
    if r > 0.5 * TWO_PI:
        raise ValueError("ζ0 must satisfy |ζ0| < π")
    lp = loop_path(gamma, omega, zeta0)
    dp = direct_path(gamma, omega, zeta0)
    via_loop, s1 = cont_phi_k(data, lp, k_max, m, cfg, N)
    direct, _ = cont_phi_k(data, dp, k_max, m, cfg, N)
    with mp.working(data.prec):
        return [a - b for a, b in zip(via_loop, direct)], s1


def bridge_check(data, m, k_max, zeta0, gamma=None, cfg=None, N=None, res=None):
    """Compare measured variations with Σ_{k₁+k₂=k, k₂≥1} S_{ω,k₁}·Ψ̂_{k₂}(ζ0)."""
    res = res or residua(data, m, gamma, k_max, cfg, N)
    var, _ = variation_at(data, m, k_max, zeta0, gamma, cfg, N)
    prec = data.prec
    with mp.working(prec):
        omega = mp.two_pi_i(prec) * m
    psi = _psi_hat_values(data, omega, k_max, zeta0)
    reports = []
    with mp.working(prec):
        for k in range(k_max + 1):
            pred = mp.num(0, prec)
            for k2 in range(1, k + 1):
                pred = pred + res.S[k - k2] * psi[k2]
            diff = abs(complex(var[k] - pred))
            mag = abs(complex(pred))
            reports.append(VariationReport(k, complex(zeta0), var[k], pred,
                                           diff / mag if mag else math.inf, diff))
    return reports
