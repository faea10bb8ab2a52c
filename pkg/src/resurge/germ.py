"""Rational simple parabolic germs and their derived series.

A germ is given as a rational map num(z)/den(z) with coefficient lists in
ascending powers.  In the chart at infinity it must read
f(z) = z + 1 − ρ/z + O(z^{-2}); in the chart at the origin
g(w) = w + a₂w² + … with a₂ ≠ 0.
"""

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import mp
from .errors import InternalInconsistency, NotRational, NotSimpleParabolic, TruncationOverflow
from .series import Composer, IntSeries, exp, log1p, mul

DEFAULT_DEPTH = 64
DEFAULT_PRECISION = 160


def _exact(x):
    """Keep integers and fractions exact, everything else as complex or a string pair."""
    if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
        return x
    if isinstance(x, float):
        return Fraction(x) if x == int(x) else x
    if isinstance(x, (list, tuple)):
        if len(x) != 2:
            raise NotRational(f"complex coefficient must be a pair, got {x!r}")
        return (str(x[0]), str(x[1]))
    if isinstance(x, complex):
        return x
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except ValueError:
            return x
    raise NotRational(f"cannot read coefficient {x!r}")


def _to_num(x, prec):
    if isinstance(x, tuple):
        return mp.from_pair(list(x), prec)
    return mp.num(x, prec)


def _trim(coeffs, prec):
    arr = [_to_num(c, prec) for c in coeffs]
    while len(arr) > 1 and arr[-1] == 0:
        arr.pop()
        coeffs = coeffs[:-1]
    return list(coeffs), arr


@dataclass(frozen=True)
class GermSpec:
    chart: str
    numerator: tuple
    denominator: tuple = (1,)
    name: str = ""

    def __post_init__(self):
        if self.chart not in ("origin", "infinity"):
            raise NotRational(f"chart must be 'origin' or 'infinity', got {self.chart!r}")
        object.__setattr__(self, "numerator", tuple(_exact(c) for c in self.numerator))
        object.__setattr__(self, "denominator", tuple(_exact(c) for c in self.denominator))
        if not self.numerator or not self.denominator:
            raise NotRational("numerator and denominator must be non-empty")

    def polys(self, prec):
        num = _trim(list(self.numerator), prec)[1]
        den = _trim(list(self.denominator), prec)[1]
        if all(c == 0 for c in den):
            raise NotRational("denominator is identically zero")
        return num, den

    def to_json(self):
        def enc(c):
            if isinstance(c, Fraction):
                return str(c) if c.denominator != 1 else int(c)
            if isinstance(c, tuple):
                return list(c)
            if isinstance(c, complex):
                return [repr(c.real), repr(c.imag)]
            return c
        return {"chart": self.chart, "num": [enc(c) for c in self.numerator],
                "den": [enc(c) for c in self.denominator], "name": self.name}

    def digest(self):
        text = json.dumps(self.to_json(), sort_keys=True)
        return hashlib.sha256(text.encode()).hexdigest()[:16]

    def __call__(self, z):
        """Evaluate the rational map in double precision."""
        num, den = self.polys(mp.DOUBLE)
        return _horner(num, z) / _horner(den, z)


PRESETS = {
    "translation": GermSpec("infinity", (1, 1), (1,), "translation"),
    "quad": GermSpec("infinity", (0, 0, 1), (-1, 1), "quad"),
    "rho0": GermSpec("infinity", (1, 0, 1, 1), (0, 0, 1), "rho0"),
}


ALIASES = {"z+1": "translation", "z^2/(z-1)": "quad", "z+1+z^-2": "rho0"}


def preset(name):
    try:
        return PRESETS[ALIASES.get(name, name)]
    except KeyError:
        raise NotRational(f"unknown preset {name!r}; known: {sorted(PRESETS)}") from None


# ------------------------------------------------------------ polynomials (ascending)

def _horner(p, z):
    acc = 0 * z
    for c in reversed(p):
        acc = acc * z + c
    return acc


def _deg(p):
    for i in range(len(p) - 1, -1, -1):
        if p[i] != 0:
            return i
    return -1


def _taylor_shift(p, c):
    """Coefficients of p(w + c)."""
    out = list(p)
    n = len(out)
    for i in range(n - 1):
        for j in range(n - 2, i - 1, -1):
            out[j] = out[j] + c * out[j + 1]
    return out


def _divmod_linear_check(num, den, prec):
    """Return the quotient q0 + q1 z of num/den, requiring deg num = deg den + 1."""
    dn, dd = _deg(num), _deg(den)
    if dd < 0:
        raise NotRational("denominator is identically zero")
    if dn != dd + 1:
        raise NotSimpleParabolic(f"degree of numerator ({dn}) must exceed the denominator's ({dd}) by one")
    q1 = num[dn] / den[dd]
    rest = [num[i] - q1 * (den[i - 1] if 1 <= i <= dd + 1 else 0) for i in range(dn + 1)]
    q0 = rest[dd] / den[dd] if dd >= 0 else 0
    return q0, q1


def _close(a, b, prec):
    tol = 1e-12 if mp.is_double(prec) else 2.0 ** (16 - prec)
    return abs(complex(a - b)) <= tol * max(1.0, abs(complex(b)))


def _encode(c, prec):
    z = complex(c)
    if z.imag == 0 and z.real == round(z.real) and abs(z.real) < 2 ** 50 and _close(c, round(z.real), prec):
        return int(round(z.real))
    return tuple(mp.to_pair(c, prec))


def normalize_to_infinity(spec, prec=256):
    """Rewrite a germ in the chart at infinity, where f(z) = z + 1 + O(1/z)."""
    if spec.chart == "infinity":
        num, den = spec.polys(prec)
        with mp.working(prec):
            q0, q1 = _divmod_linear_check(num, den, prec)
        if not _close(q1, 1, prec):
            raise NotSimpleParabolic(f"multiplier at infinity is {complex(q1)}, expected 1")
        if not _close(q0, 1, prec):
            raise NotSimpleParabolic(f"translation part is {complex(q0)}, expected 1 (rescale the germ)")
        return spec
    with mp.working(prec):
        P, Q = spec.polys(prec)
        if Q[0] == 0:
            raise NotRational("origin-chart germ has a pole at 0")
        # g = P/Q as a series to order 2
        g = [P[k] if k < len(P) else 0 for k in range(3)]
        q = [Q[k] if k < len(Q) else 0 for k in range(3)]
        s0 = g[0] / q[0]
        s1 = (g[1] - s0 * q[1]) / q[0]
        s2 = (g[2] - s0 * q[2] - s1 * q[1]) / q[0]
        if s0 != 0 and not _close(s0 + 1, 1, prec):
            raise NotSimpleParabolic("origin-chart germ must fix 0")
        if not _close(s1, 1, prec):
            raise NotSimpleParabolic(f"multiplier at 0 is {complex(s1)}, expected 1")
        if _close(s2 + 1, 1, prec):
            raise NotSimpleParabolic("a₂ = 0: the germ is not simple parabolic")
        a2 = s2
        d = max(len(P), len(Q)) - 1
        t = -1 / a2
        # z^d·(−Q(w)) and z^d·a₂P(w) with w = t/z
        new_num = [0] * (d + 1)
        new_den = [0] * (d + 1)
        for k, c in enumerate(Q):
            new_num[d - k] = new_num[d - k] - c * t ** k
        for k, c in enumerate(P):
            new_den[d - k] = new_den[d - k] + a2 * c * t ** k
        while new_num[0] == 0 and new_den[0] == 0 and len(new_num) > 1:
            new_num.pop(0)
            new_den.pop(0)
        num = [_encode(c, prec) for c in new_num]
        den = [_encode(c, prec) for c in new_den]
    out = GermSpec("infinity", tuple(num), tuple(den), spec.name)
    return normalize_to_infinity(out, prec)


def expand_b(spec, D, prec=DEFAULT_PRECISION):
    """b(w) = f(w − 1) − w as a series in 1/w, valid to order D."""
    if spec.chart != "infinity":
        raise NotRational("expand_b needs a germ in the chart at infinity")
    if D < 2:
        raise ValueError("depth D must be at least 2")
    with mp.working(prec):
        num, den = spec.polys(prec)
        n1 = _taylor_shift(num, mp.num(-1, prec))
        d1 = _taylor_shift(den, mp.num(-1, prec))
        m = _deg(d1)
        r = [n1[k] if k < len(n1) else 0 for k in range(m + 2)]
        for k in range(m + 1):
            r[k + 1] = r[k + 1] - d1[k]
        if not _close(r[m + 1] + 1, 1, prec) or (m >= 0 and not _close(r[m] + 1, 1, prec)):
            raise NotSimpleParabolic("f(w − 1) − w does not vanish at infinity")
        dx = mp.zeros(D + 1, prec)
        nx = mp.zeros(D + 1, prec)
        for i in range(min(m, D) + 1):
            dx[i] = d1[m - i]
        for i in range(1, min(m, D) + 1):
            nx[i] = r[m - i]
        if dx[0] == 0:
            raise TruncationOverflow("degenerate denominator")
        out = mp.zeros(D + 1, prec)
        for n in range(1, D + 1):
            acc = nx[n]
            k = min(n, m)
            if k >= 1:
                acc = acc - np.dot(dx[1:k + 1], out[n - 1:n - k - 1 if n - k - 1 >= 0 else None:-1])
            out[n] = acc / dx[0]
    return IntSeries(out, prec, val=1)


def rho_of(b):
    """ρ = −(coefficient of 1/w in b)."""
    with mp.working(b.prec):
        return -b.coeffs[1] if b.order >= 1 else mp.num(0, b.prec)


def radius_of(spec):
    """Exponential type R₀ of the Borel image of b: max(1, |p + 1|) over finite poles and zeros p of f."""
    pts = []
    for poly in spec.polys(mp.DOUBLE):
        c = np.array([complex(x) for x in poly])
        while len(c) > 1 and c[-1] == 0:
            c = c[:-1]
        if len(c) > 1:
            pts.extend(np.roots(c[::-1]))
    return max([1.0] + [abs(p + 1) for p in pts])


@dataclass
class GermData:
    spec: GermSpec
    b: IntSeries
    rho: object
    b_star: IntSeries
    radius_r: float
    D: int
    prec: int
    log_ratio: IntSeries = field(repr=False)
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def composer(self):
        c = self._cache.get("composer")
        if c is None:
            c = Composer(self.b, size=self.D + 8)
            self._cache["composer"] = c
        return c

    def exp_minus(self, omega):
        """e^{−ω b_*}."""
        key = ("exp", tuple(mp.to_pair(mp.num(omega, self.prec), self.prec)))
        if key not in self._cache:
            with mp.working(self.prec):
                self._cache[key] = exp(self.b_star.scale(-mp.num(omega, self.prec)))
        return self._cache[key]

    def c_alpha(self, alpha):
        """((1 + b/z)/(1 − 1/z))^α."""
        key = ("calpha", tuple(mp.to_pair(mp.num(alpha, self.prec), self.prec)))
        if key not in self._cache:
            with mp.working(self.prec):
                self._cache[key] = exp(self.log_ratio.scale(mp.num(alpha, self.prec)))
        return self._cache[key]

    def with_depth(self, D):
        return germ_data(self.spec, D, self.prec)

    def with_precision(self, prec):
        return germ_data(self.spec, self.D, prec)


def _log_ratio(b):
    """log((1 + b/z)/(1 − 1/z)), valid one order beyond b."""
    prec = b.prec
    n = b.order + 1
    u = IntSeries(np.concatenate([mp.zeros(1, prec), b.coeffs]), prec, val=2)
    with mp.working(prec):
        minus_x = mp.zeros(n + 1, prec)
        minus_x[1] = mp.num(-1, prec)
        return log1p(u) - log1p(IntSeries(minus_x, prec, val=1))


def b_star(b, rho):
    """b + ρ·log((1 + b/z)/(1 − 1/z)); the 1/z coefficient cancels."""
    prec = b.prec
    L = _log_ratio(b)
    with mp.working(prec):
        out = b + L.truncate(b.order).scale(rho)
        c1 = out.coeffs[1] if out.order >= 1 else 0
        scale = max(1.0, float(np.max(mp.absval(b.coeffs[:3]))))
        tol = 1e-12 if mp.is_double(prec) else 2.0 ** (16 - prec)
        if abs(complex(c1)) > tol * scale:
            raise InternalInconsistency(f"1/z coefficient of b_* is {complex(c1)}, expected 0")
    return IntSeries(out.coeffs, prec, val=2), L


def germ_data(spec, D=DEFAULT_DEPTH, prec=DEFAULT_PRECISION):
    """Expand a germ into the series the rest of the library works with."""
    prec = mp.check_prec(prec)
    spec = normalize_to_infinity(spec, max(prec, 256))
    b = expand_b(spec, D, prec)
    rho = rho_of(b)
    bs, L = b_star(b, rho)
    return GermData(spec=spec, b=b, rho=rho, b_star=bs, radius_r=radius_of(spec), D=D, prec=prec, log_ratio=L)


def from_descriptor(desc):
    """Build a GermSpec from a CLI/config descriptor (dict or preset name)."""
    if isinstance(desc, str):
        return preset(desc)
    if not isinstance(desc, dict):
        raise NotRational(f"germ descriptor must be a name or an object, got {desc!r}")
    kind = desc.get("type")
    if kind == "preset":
        return preset(desc.get("name"))
    if kind == "rational_infinity":
        return GermSpec("infinity", tuple(desc["num"]), tuple(desc.get("den", [1])), desc.get("name", ""))
    if kind == "rational_origin":
        return GermSpec("origin", tuple(desc["num"]), tuple(desc.get("den", [1])), desc.get("name", ""))
    if kind == "polynomial_origin":
        return GermSpec("origin", tuple(desc["coeffs"]), (1,), desc.get("name", ""))
    if kind in PRESETS or kind in ALIASES:
        return preset(kind)
    raise NotRational(f"unknown germ type {kind!r}")
