"""Horn maps and their Fourier coefficients computed from the dynamics.

The normalised Fatou coordinates are evaluated by pushing a point into
the asymptotic regime (|w| > R_big) with the rational map itself and
summing z + ρ log z + φ̃(z) there with optimal truncation.  This route
never touches the Borel plane, so it is an independent check on the
residua.
"""

import cmath
import math
from dataclasses import dataclass, field

import mpmath
import numpy as np

from . import mp
from .errors import ConfigError, NewtonDiverged, NoAsymptoticRegime, NoiseFloorDominates, OrbitEscapesDomain
from .formal import solve_phi_tilde
from .germ import germ_data, radius_of

NEWTON_STEPS = 30


@dataclass(frozen=True)
class OracleConfig:
    H: float = 2.5
    M: int = 64
    n_escape: int = 100000
    R_big: float = 40.0
    J_opt: int = 60
    precision: int = 53
    modes: int = 4

    def validate(self, radius_r=1.0):
        if self.H < 2:
            raise ConfigError(f"H must be at least 2, got {self.H}")
        if self.M < 4 or self.M & (self.M - 1):
            raise ConfigError(f"M must be a power of two, got {self.M}")
        if self.R_big < 4 * radius_r:
            raise ConfigError(f"R_big = {self.R_big} is below 4·radius_r = {4 * radius_r:.3g}")
        if self.J_opt < 2 or self.n_escape < 1:
            raise ConfigError("J_opt and n_escape must be positive")
        if not 1 <= self.modes < self.M // 2:
            raise ConfigError(f"modes must lie in [1, M/2), got {self.modes}")
        return self


@dataclass
class FourierResult:
    side: str
    H: float
    M: int
    const_term: complex
    const_expected: complex
    A: dict
    errors: dict
    residual_floor: float
    samples: list = field(default_factory=list, repr=False)

    @property
    def const_error(self):
        return abs(self.const_term - self.const_expected)

    def to_json(self):
        pair = lambda z: [repr(complex(z).real), repr(complex(z).imag)]  # noqa: E731
        return {"side": self.side, "H": self.H, "M": self.M, "const_term": pair(self.const_term),
                "const_expected": pair(self.const_expected),
                "A": {str(k): pair(v) for k, v in self.A.items()},
                "errors": {str(k): v for k, v in self.errors.items()},
                "residual_floor": self.residual_floor}


class _Arith:
    """Complex scalars in double (Python complex) or in mpmath at a given precision."""

    def __init__(self, prec):
        self.prec = prec
        self.double = prec <= 53

    def num(self, x):
        if self.double:
            return complex(x)
        if isinstance(x, (mpmath.mpc, mpmath.mpf)):
            return mpmath.mpc(x)
        if mp._is_mp(x):
            return mp.to_mpmath(x)
        return mpmath.mpc(x)

    def log(self, z, lo):
        """Log with imaginary part in [lo, lo + 2π)."""
        if self.double:
            v = cmath.log(z)
            a, tp = v.imag, 2 * math.pi
        else:
            v = mpmath.log(z)
            a, tp = v.imag, 2 * mpmath.pi
        while a < lo:
            a += tp
        while a >= lo + tp:
            a -= tp
        return complex(v.real, a) if self.double else mpmath.mpc(v.real, a)

    def eps(self):
        return 2.0 ** -self.prec

    def out(self, z):
        return complex(z)


class HornOracle:
    """Fatou coordinates and horn maps of one rational germ."""

    def __init__(self, spec, cfg=None, data=None):
        self.cfg = cfg = cfg or OracleConfig()
        self.spec = spec
        cfg.validate(radius_of(spec))
        self.ar = _Arith(cfg.precision)
        prec = max(cfg.precision, 64)
        data = data or germ_data(spec, cfg.J_opt + 8, prec)
        self.spec = data.spec
        phi = solve_phi_tilde(data)
        with mp.working(data.prec):
            self.phi = [self.ar.num(c) for c in phi.coeffs]
            self.rho = self.ar.num(data.rho)
        num, den = self.spec.polys(data.prec)
        with mp.working(data.prec):
            self.num = [self.ar.num(c) for c in num]
            self.den = [self.ar.num(c) for c in den]
        self.J = min(cfg.J_opt, len(self.phi) - 1)
        self.trivial = all(c == 0 for c in self.phi) and self.rho == 0

    def _ctx(self):
        return mpmath.workprec(self.cfg.precision) if not self.ar.double else _Null()

    def f(self, z):
        n = self.num[-1]
        for c in self.num[-2::-1]:
            n = n * z + c
        d = self.den[-1]
        for c in self.den[-2::-1]:
            d = d * z + c
        if d == 0:
            raise OrbitEscapesDomain(f"orbit hit a pole of the germ at {complex(z)}")
        return n / d

    def tail(self, w):
        """φ̃(w) summed up to its smallest term (at most J_opt terms) and that term's size."""
        x = 1 / w
        p = x
        acc = 0
        best = math.inf
        for n in range(1, self.J + 1):
            t = self.phi[n] * p
            a = abs(complex(t))
            if a > best and best < 1:
                break
            acc = acc + t
            best = min(best, a) if a else best
            p = p * x
        if best == math.inf:
            best = 0.0
        if best > math.sqrt(self.ar.eps()):
            raise NoAsymptoticRegime(f"smallest term of the asymptotic series is {best:.3g} at |w| = {abs(complex(w)):.3g}")
        return acc, best

    def tail_derivative(self, w):
        x = 1 / w
        p = x * x
        acc = 0
        for n in range(1, self.J + 1):
            acc = acc - n * self.phi[n] * p
            p = p * x
        return acc

    def _in_plus_regime(self, z):
        zc = complex(z)
        return abs(zc) > self.cfg.R_big and zc.real > abs(zc.imag)

    def _in_minus_regime(self, z):
        zc = complex(z)
        return abs(zc) > self.cfg.R_big and -zc.real > abs(zc.imag)

    def fatou_plus(self, z, extra=0):
        """v⁺(z) from the forward orbit; ``extra`` further steps inside the regime."""
        with self._ctx():
            z = self.ar.num(z)
            n = 0
            while not self._in_plus_regime(z):
                z = self.f(z)
                n += 1
                if n > self.cfg.n_escape or not cmath.isfinite(complex(z)):
                    raise OrbitEscapesDomain(f"orbit did not reach the attracting regime in {self.cfg.n_escape} steps")
            for _ in range(extra):
                z = self.f(z)
                n += 1
            t, _ = self.tail(z)
            v = z + self.rho * self.ar.log(z, -math.pi) + t - n
        return v

    def fatou_minus_asymptotic(self, w):
        """v⁻(w) = w + ρ Log w + φ̃(w) for w in the repelling regime, Log with arg in [0, 2π)."""
        with self._ctx():
            w = self.ar.num(w)
            t, _ = self.tail(w)
            return w + self.rho * self.ar.log(w, 0.0) + t

    def fatou_minus_inverse(self, Z, return_steps=False):
        """w with v⁻(w) = Z: Newton in the repelling regime, then forward iteration."""
        with self._ctx():
            Z = self.ar.num(Z)
            n = max(0, math.ceil(complex(Z).real + self.cfg.R_big + abs(complex(Z).imag) + 2))
            w, steps = self._newton(Z - n)
            for _ in range(n):
                w = self.f(w)
                if not cmath.isfinite(complex(w)):
                    raise OrbitEscapesDomain("forward orbit overflowed")
        return (w, steps) if return_steps else w

    def _newton(self, W):
        """Solve w + ρ Log w + φ̃(w) = W (arg in [0, 2π)) from the seed w = W."""
        w = W
        tol = self.ar.eps() * 64 * max(1.0, abs(complex(W)))
        for steps in range(1, NEWTON_STEPS + 1):
            t, _ = self.tail(w)
            F = w + self.rho * self.ar.log(w, 0.0) + t - W
            dF = 1 + self.rho / w + self.tail_derivative(w)
            dw = F / dF
            w = w - dw
            if not self._in_minus_regime(w) and abs(complex(w)) < self.cfg.R_big / 2:
                raise NewtonDiverged(f"Newton left the repelling regime at {complex(w)}")
            if abs(complex(dw)) <= tol:
                return w, steps
        raise NewtonDiverged(f"Newton did not converge in {NEWTON_STEPS} steps at W = {complex(W)}")

    def horn(self, Z):
        """h(Z) = v⁺((v⁻)^{-1}(Z))."""
        return self.fatou_plus(self.fatou_minus_inverse(Z))

    def abel_residual(self, points, extra=(1, 3, 8)):
        """max |v⁺(f^j(z)) − v⁺(z) − j| with the asymptotic sum taken j steps deeper.

        Both values come from the same orbit, so this measures how well
        w + ρ Log w + φ̃(w) satisfies the Abel equation in the regime."""
        worst = 0.0
        with self._ctx():
            for z in points:
                v0 = self.fatou_plus(z)
                for j in extra:
                    worst = max(worst, abs(complex(self.fatou_plus(z, extra=j) - v0)))
        return worst

    def round_trip_residual(self, points):
        """max |v⁻(w₀) − (Z − n)| at the Newton solutions for the given Z."""
        worst = 0.0
        with self._ctx():
            for Z in points:
                Z = self.ar.num(Z)
                n = max(0, math.ceil(complex(Z).real + self.cfg.R_big + abs(complex(Z).imag) + 2))
                w0 = self._newton(Z - n)[0]
                worst = max(worst, abs(complex(self.fatou_minus_asymptotic(w0) - (Z - n))))
        return worst

    def sample_height(self, side):
        """|Im Z| of the sampling line: H, raised by 2π|Re ρ| on the side where A_m carry e^{4π²m|ρ|}."""
        r = complex(self.rho).real
        extra = max(0.0, r) if side == "up" else max(0.0, -r)
        return self.cfg.H + 2 * math.pi * extra

    def fourier(self, side, require=()):
        """Fourier data of the up or low horn map sampled at Z_j = j/M ± iH."""
        if side not in ("up", "low"):
            raise ValueError("side must be 'up' or 'low'")
        cfg = self.cfg
        M = cfg.M
        H = self.sample_height(side)
        sgn = 1 if side == "up" else -1
        vals, samples = [], []
        with self._ctx():
            for j in range(M):
                Z = self.ar.num(complex(j / M, sgn * H)) if self.ar.double else \
                    mpmath.mpc(mpmath.mpf(j) / M, sgn * mpmath.mpf(H))
                h = self.horn(Z)
                vals.append(h - Z)
                samples.append((j / M, complex(h)))
            # ĉ_q = (1/M) Σ v_j e^{−2πiqj/M}
            if self.ar.double:
                chat = np.fft.fft(np.array(vals, dtype=complex)) / M
                chat = [complex(c) for c in chat]
            else:
                chat = []
                for q in range(M):
                    acc = 0
                    for j, v in enumerate(vals):
                        acc = acc + v * mpmath.expjpi(-2 * mpmath.mpf(q * j) / M)
                    chat.append(acc / M)
        scale = max(abs(complex(v)) for v in vals)
        const = chat[0]
        # modes near M/2 are aliasing and rounding only
        band = [abs(complex(chat[q])) for q in range(M // 2 - M // 8, M // 2 + M // 8 + 1)]
        floor = max(band + [scale * self.ar.eps() * M])
        A, errors = {}, {}
        for m in range(1, cfg.modes + 1):
            q = m if side == "up" else M - m
            c = chat[q]
            amp = math.exp(2 * math.pi * m * H)
            key = m if side == "up" else -m
            if abs(complex(c)) > floor:
                A[key] = complex(c) * amp
                errors[key] = floor * amp
            elif key in require:
                raise NoiseFloorDominates(f"|A_{key}|·e^(−2π{m}H) is below the noise floor {floor:.3g}")
        expected = 0j if side == "up" else complex(-2j * math.pi * complex(self.rho))
        return FourierResult(side, H, M, complex(const), expected, A, errors, floor, samples)


class _Null:
    def __enter__(self):
        return self

    def __exit__(self, *exc):
        return False


def fatou_plus(spec, z, cfg=None):
    return HornOracle(spec, cfg).fatou_plus(z)


def fatou_minus_inverse(spec, Z, cfg=None):
    return HornOracle(spec, cfg).fatou_minus_inverse(Z)


def horn_fourier(spec, side, cfg=None, require=()):
    return HornOracle(spec, cfg).fourier(side, require)
