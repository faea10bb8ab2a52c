"""The acceptance checks, shared by the test suite and ``resurge selftest``.

Each check returns a ``Check`` with the measured quantity and the
threshold it was held to.  Expensive intermediate results (residua runs,
oracles) are kept in a ``Context`` so that several checks can share them.
"""

import cmath
import math
import time
from dataclasses import dataclass, field, replace
from fractions import Fraction

import mpmath

from . import alien, borel, formal, germ, horn, mp, series
from .grid import build_grid
from .paths import detour_gamma_m, gamma_tilde, segment_gamma_m

P = 160
TEST_GERMS = ("quad", "rho0")


@dataclass
class Check:
    number: int
    name: str
    passed: bool
    measured: float
    threshold: float
    detail: str = ""
    seconds: float = 0.0

    def line(self):
        tag = "PASS" if self.passed else "FAIL"
        return (f"[{tag}] criterion {self.number:2d} {self.name}: measured {self.measured:.3g} "
                f"vs threshold {self.threshold:.3g} ({self.seconds:.1f} s){' ' + self.detail if self.detail else ''}")


@dataclass
class Context:
    """Shared computations; residua runs are timed so later checks can account for them."""

    precision: int = P
    k_max: int = 12
    cfg: alien.AlienConfig = field(default_factory=alien.AlienConfig)
    _data: dict = field(default_factory=dict)
    _res: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)

    def data(self, name, D=64, prec=None):
        key = (name, D, prec or self.precision)
        if key not in self._data:
            self._data[key] = germ.germ_data(germ.preset(name), D, prec or self.precision)
        return self._data[key]

    def residua(self, name, m, k_max=None, gamma=None, N=None, cfg=None, tag="straight"):
        k_max = self.k_max if k_max is None else k_max
        key = (name, m, k_max, tag, N, cfg)
        if key not in self._res:
            t = time.perf_counter()
            self._res[key] = alien.residua(self.data(name), m, gamma, k_max, cfg or self.cfg, N)
            self.timings[key] = time.perf_counter() - t
        return self._res[key]


def _rel(a, b):
    a, b = complex(a), complex(b)
    return abs(a - b) / abs(b) if b else abs(a - b)


def _rel_mp(a, b, prec):
    """|a − b|/|b| evaluated at full precision."""
    with mp.working(prec):
        d = abs(complex(mp.to_mpmath(a - b))) if not mp.is_double(prec) else abs(a - b)
        s = abs(complex(b))
    return d / s if s else d


def _timed(fn):
    def wrapper(*args, **kw):
        t = time.perf_counter()
        out = fn(*args, **kw)
        out.seconds = time.perf_counter() - t
        return out
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


# ------------------------------------------------------------------ 1

@_timed
def check_trivial(ctx, tol=1e-12, time_limit=10.0):
    """Translation germ: every S_k and A_m negligible, and fast."""
    t = time.perf_counter()
    data = germ.germ_data(germ.preset("translation"), 64, ctx.precision)
    worst = 0.0
    for m in (1, -1):
        res = alien.residua(data, m, None, ctx.k_max, ctx.cfg)
        worst = max([worst, abs(complex(res.A))] + [abs(complex(s)) for s in res.S])
    orc = horn.HornOracle(germ.preset("translation"))
    for side in ("up", "low"):
        fr = orc.fourier(side)
        worst = max([worst, abs(fr.const_term)] + [abs(v) for v in fr.A.values()])
    elapsed = time.perf_counter() - t
    ok = worst < tol and elapsed < time_limit
    return Check(1, "trivial germ", ok, worst, tol, f"runtime {elapsed:.2f} s (limit {time_limit:g} s)")


# ------------------------------------------------------------------ 2

@_timed
def check_borel_closed_forms(ctx, tol=1e-12, n_max=40):
    """Taylor coefficients of 𝓑(b) against e^{2ζ} (quad) and ζe^ζ (rho0)."""
    worst = 0.0
    refs = {"quad": lambda n: Fraction(2 ** n, math.factorial(n)),
            "rho0": lambda n: Fraction(0) if n == 0 else Fraction(1, math.factorial(n - 1))}
    for name, ref in refs.items():
        d = ctx.data(name, D=n_max + 8)
        B = borel.borel_int(d.b, d.radius_r)
        for n in range(n_max + 1):
            r = ref(n)
            with mp.working(ctx.precision):
                diff = abs(complex(mp.to_mpmath(B.coeffs[n] - mp.num(r.numerator, ctx.precision) / r.denominator)))
            worst = max(worst, diff / float(r) if r else diff)
    return Check(2, "closed-form Borel images", worst < tol, worst, tol, f"n ≤ {n_max}, both germs")


# ------------------------------------------------------------------ 3

@_timed
def check_first_residuum(ctx, tol=1e-10):
    res = ctx.residua("rho0", 1)
    with mpmath.workprec(ctx.precision):
        ref = -4 * mpmath.pi ** 2
        err = float(abs(mp.to_mpmath(res.S[0]) - ref) / abs(ref))
    return Check(3, "S_0 = −4π²", err < tol, err, tol, f"S_0 = {complex(res.S[0]).real:.12g}")


# ------------------------------------------------------------------ 4

@_timed
def check_bernoulli(ctx, tol=1e-12, order=40):
    """E(z^{-2}) = Σ B_n z^{-n-1}."""
    prec = ctx.precision
    psi = series.IntSeries.monomial(2, order + 2, prec)
    out = formal.op_E(psi)
    worst = 0.0
    with mpmath.workprec(prec + 20):
        for n in range(order + 1):
            ref = mpmath.bernoulli(n)
            got = mp.to_mpmath(out.coeffs[n + 1])
            diff = float(abs(got - ref))
            worst = max(worst, diff / float(abs(ref)) if ref else diff)
    return Check(4, "E(z^-2) against Bernoulli numbers", worst < tol, worst, tol, f"orders 0..{order}")


# ------------------------------------------------------------------ 5

def exponential_identity_errors(ctx, k_max=30, D=40):
    """Per-coefficient relative error between Σ_{k≤k_max} Ψ̃_k and e^{−ωφ̃}."""
    prec = ctx.precision
    d = ctx.data("quad", D=D)
    with mp.working(prec):
        omega = mp.two_pi_i(prec)
        psis = formal.psi_sequence(d, omega, k_max)
        total = psis[0]
        for p in psis[1:]:
            total = total + p
        ref = series.exp(formal.solve_phi_tilde(d).scale(-omega))
    n = min(total.order, ref.order, D)
    errs = []
    for i in range(n + 1):
        errs.append(_rel_mp(total.coeffs[i], ref.coeffs[i], prec))
    return errs


@_timed
def check_exponential_identity(ctx, tol=1e-10, k_max=30, D=40):
    errs = exponential_identity_errors(ctx, k_max, D)
    worst = max(errs)
    first_bad = next((i for i, e in enumerate(errs) if e >= tol), None)
    detail = f"all {len(errs)} coefficients" if first_bad is None else \
        f"orders ≤ {first_bad - 1} agree to {max(errs[:first_bad]):.2g}; order {first_bad} off by {errs[first_bad]:.2g}"
    return Check(5, "Σ Ψ_k = exp(−ωφ)", worst < tol, worst, tol, detail)


# ------------------------------------------------------------------ 6

def borel_sum_errors(ctx, k_max=40, n_max=10, D=48):
    """Relative error of Σ_{k≤K} 𝓑Φ̃_k against 𝓑(z^{−α}{φ̃}_N), per K and coefficient index."""
    prec = ctx.precision
    d = ctx.data("quad", D=D)
    st = formal.omega_setup(d, 1)
    with mp.working(prec):
        target = series.FracSeries(st.alpha + st.N + 1, st.tail.coeffs[st.N + 1:], prec)
    Bt = borel.borel_frac(target).entire_part.coeffs
    phis = formal.phi_sequence_formal(d, 1, k_max)
    acc = None
    table = []
    for p in phis:
        if abs(complex(p.gamma) - complex(target.gamma)) > 1e-12:
            raise AssertionError("offsets of Φ_k and of the target differ")
        B = borel.borel_frac(p).entire_part.coeffs
        with mp.working(prec):
            acc = B[:n_max + 1].copy() if acc is None else acc + B[:n_max + 1]
        table.append([_rel_mp(acc[n], Bt[n], prec) for n in range(n_max + 1)])
    return table


@_timed
def check_borel_sum(ctx, tol=1e-8, k_max=40, n_max=10):
    table = borel_sum_errors(ctx, k_max, n_max)
    last = table[-1]
    worst = max(last)
    # geometric convergence: the error at index 0 must shrink by a fixed factor per term
    e0 = [row[0] for row in table]
    ratio = (e0[-1] / e0[len(e0) // 2]) ** (1 / (len(e0) - 1 - len(e0) // 2))
    return Check(6, "Σ 𝓑Φ_k = 𝓑(z^-α {φ}_N)", worst < tol and ratio < 1, worst, tol,
                 f"terminal errors by index {[f'{e:.2g}' for e in last]}; index-0 ratio per term {ratio:.4f}")


# ------------------------------------------------------------------ 7

BRIDGE_POINTS = (0.3 * cmath.exp(1j * math.pi / 4), 0.2 * cmath.exp(-1j * math.pi / 3))


@_timed
def check_bridge(ctx, tol=1e-6, tol_k0=1e-10, k_max=3):
    worst, worst0 = 0.0, 0.0
    for name in TEST_GERMS:
        res = ctx.residua(name, 1)
        for z0 in BRIDGE_POINTS:
            reps = alien.bridge_check(ctx.data(name), 1, k_max, z0, cfg=replace(ctx.cfg, estimate_errors=False),
                                      res=res)
            worst0 = max(worst0, reps[0].abs_error)
            worst = max([worst] + [r.rel_error for r in reps[1:]])
    ok = worst < tol and worst0 < tol_k0
    return Check(7, "bridge identity by monodromy", ok, worst, tol, f"k = 0 variation {worst0:.2g} (limit {tol_k0:g})")


# ------------------------------------------------------------------ 8

@_timed
def check_path_independence(ctx, tol=1e-8, k_max=6):
    worst = 0.0
    for name in TEST_GERMS:
        a = ctx.residua(name, 1)
        b = ctx.residua(name, 1, k_max=k_max, gamma=detour_gamma_m(1), tag="detour")
        worst = max([worst] + [_rel_mp(b.S[k], a.S[k], ctx.precision) for k in range(k_max + 1)])
    return Check(8, "straight vs detour path", worst < tol, worst, tol, f"k ≤ {k_max}, both germs")


# ------------------------------------------------------------------ 9

@_timed
def check_n_stability(ctx, tol=1e-8):
    a = ctx.residua("quad", 1)
    N0 = a.meta["N"]
    b = ctx.residua("quad", 1, N=N0 + 2, tag=f"N{N0 + 2}")
    err = _rel_mp(b.total, a.total, ctx.precision)
    return Check(9, "N vs N+2", err < tol, err, tol, f"N = {N0} and {N0 + 2}")


# ------------------------------------------------------------------ 10

@_timed
def check_decay(ctx, k_upto=10):
    worst_lam = 0.0
    bad = []
    for name in TEST_GERMS:
        res = ctx.residua(name, 1)
        worst_lam = max(worst_lam, res.lambda_fit)
        bad += [(name, k) for k in alien.outside_envelope(res, k_upto)]
    ok = worst_lam < 1 and not bad
    return Check(10, "geometric decay", ok, worst_lam, 1.0, f"outside envelope: {bad or 'none'}")


# ------------------------------------------------------------------ 11

@_timed
def check_cross_method(ctx, tol=1e-3, time_limit=300.0, H=2.5, M=64):
    worst = 0.0
    compute = 0.0
    parts = []
    t = time.perf_counter()
    orc = horn.HornOracle(germ.preset("rho0"), horn.OracleConfig(H=H, M=M))
    four = {"up": orc.fourier("up", require=(1,)), "low": orc.fourier("low", require=(-1,))}
    compute += time.perf_counter() - t
    for m in (1, -1):
        res = ctx.residua("rho0", m)
        compute += ctx.timings[("rho0", m, ctx.k_max, "straight", None, None)]
        idx = -m
        A_or = four["low" if m > 0 else "up"].A[idx]
        err = _rel(res.A, A_or)
        worst = max(worst, err)
        parts.append(f"A_{idx:+d}: {complex(res.A):.10g} vs {A_or:.10g}")
    ok = worst < tol and compute < time_limit
    return Check(11, "residua vs horn oracle", ok, worst, tol,
                 "; ".join(parts) + f"; compute {compute:.1f} s (limit {time_limit:g} s)")


# ------------------------------------------------------------------ 12

def laplace_pair(data, z, tol):
    """(𝓛⁰b̂_α(z), z^{−α}·𝓛⁰ĉ′_N(z)) with ĉ′_N the Borel image of (1 − 1/z)^{−α} b_N."""
    prec = data.prec
    st = formal.omega_setup(data, 1)
    bh = borel.borel_frac(st.b_alpha, data.radius_r)
    a = st.alpha
    n = st.b_N.order
    with mp.working(prec):
        binom = mp.zeros(n + 1, prec)
        binom[0] = mp.num(1, prec)
        for i in range(1, n + 1):
            binom[i] = binom[i - 1] * (a + i - 1) / i
        cN = borel.borel_int(series.mul(series.IntSeries(binom, prec), st.b_N), data.radius_r)
    lhs = borel.laplace_ray(bh, 0.0, z, tol=tol)
    rhs0 = borel.laplace_ray(cN, 0.0, z, tol=tol)
    with mp.working(prec):
        rhs = mp.exp(-a * mp.log(mp.num(z, prec))) * rhs0
    return lhs, rhs


@_timed
def check_laplace(ctx, tol=1e-8):
    d = ctx.data("quad", D=100)
    worst = 0.0
    for z in (8, 8 * cmath.exp(-1j * math.pi / 8)):
        lhs, rhs = laplace_pair(d, z, 1e-30)
        worst = max(worst, _rel_mp(rhs, lhs, ctx.precision))
    return Check(12, "Laplace identity", worst < tol, worst, tol, "z ∈ {8, 8e^(−iπ/8)}, quad germ")


# ------------------------------------------------------------------ 13

ABEL_POINTS = tuple(complex(x, y) for x in (-3.0, 0.5, 4.0) for y in (-2.5, 2.5))


@_timed
def check_oracle_internal(ctx, tol_abel=1e-10, tol_const=1e-4):
    orc = horn.HornOracle(germ.preset("quad"))
    abel = orc.abel_residual(ABEL_POINTS)
    low = orc.fourier("low")
    const_err = _rel(low.const_term, low.const_expected)
    ok = abel < tol_abel and const_err < tol_const
    return Check(13, "oracle Abel residual and low-horn constant", ok, abel, tol_abel,
                 f"const {low.const_term:.8g} vs {low.const_expected:.8g}, rel {const_err:.2g} (limit {tol_const:g})")


# ------------------------------------------------------------------ 14

@_timed
def check_quadrature(ctx, tol=1e-12):
    prec = ctx.precision
    path = gamma_tilde(segment_gamma_m(1), 2j * math.pi)
    g = build_grid(path, 0, ctx.cfg.grid, prec)
    with mp.working(prec):
        vals = [mp.exp(z) for z in g.zeta]
    integral = abs(complex(g.integrate(vals)))
    base = ctx.residua("rho0", 1)
    fine_cfg = replace(ctx.cfg, grid=ctx.cfg.grid.scaled(2), estimate_errors=False)
    fine = ctx.residua("rho0", 1, cfg=fine_cfg, tag="doubled")
    bad = [k for k in range(len(base.S)) if abs(complex(fine.S[k] - base.S[k])) >= base.errors[k]]
    ok = integral < tol and not bad
    return Check(14, "quadrature sanity", ok, integral, tol,
                 f"doubling nodes: S_k changes beyond the error estimate for k = {bad or 'none'}")


CHECKS = {1: check_trivial, 2: check_borel_closed_forms, 3: check_first_residuum, 4: check_bernoulli,
          5: check_exponential_identity, 6: check_borel_sum, 7: check_bridge, 8: check_path_independence,
          9: check_n_stability, 10: check_decay, 11: check_cross_method, 12: check_laplace,
          13: check_oracle_internal, 14: check_quadrature}


def run_all(only=None, ctx=None, report=print):
    ctx = ctx or Context()
    out = []
    for n, fn in CHECKS.items():
        if only and n not in only:
            continue
        try:
            c = fn(ctx)
        except Exception as exc:  # a crash is a failed criterion, not an aborted suite
            c = Check(n, fn.__name__, False, math.nan, math.nan, f"raised {type(exc).__name__}: {exc}")
        out.append(c)
        if report:
            report(c.line())
    return out
