"""Truncated formal series in x = 1/z.

``IntSeries`` holds Σ c_n z^{-n}; ``FracSeries`` holds Σ c_n z^{-γ-n} for a
complex offset γ.  Each instance stores coefficients up to the index
``order`` it is known to be correct to, and operations compute the exact
order to which their result is determined by their inputs.  Operations
that gain order (a shift minus the identity, a near-identity composition
minus the identity) therefore do not erode depth when iterated.
"""

import json

import numpy as np

from . import mp
from .errors import NonUnitLeadingTerm, TruncationOverflow

UNIT_TOL_BITS = 8


def _clean(coeffs, prec):
    if (coeffs.dtype == object) == mp.is_double(prec):
        return mp.convert(coeffs, prec)
    return coeffs.copy()


def _first_nonzero(c):
    for i, v in enumerate(c):
        if v != 0:
            return i
    return len(c)


class _Series:
    __slots__ = ("coeffs", "val", "prec")

    def __init__(self, coeffs, prec, val=None):
        prec = mp.check_prec(prec)
        if not isinstance(coeffs, np.ndarray):
            coeffs = mp.array(coeffs, prec)
        else:
            coeffs = _clean(coeffs, prec)
        if len(coeffs) == 0:
            raise ValueError("a series needs at least one coefficient")
        if val is None:
            val = _first_nonzero(coeffs)
        else:
            val = int(val)
            coeffs[:min(val, len(coeffs))] = 0
        self.coeffs = coeffs
        self.val = val
        self.prec = prec

    @property
    def order(self):
        return len(self.coeffs) - 1

    def __len__(self):
        return len(self.coeffs)

    def __getitem__(self, n):
        if n > self.order:
            raise TruncationOverflow(f"coefficient {n} requested, series valid to {self.order}")
        return self.coeffs[n]

    def truncate(self, order):
        if order > self.order:
            raise TruncationOverflow(f"cannot extend a series valid to {self.order} up to {order}")
        return self._new(self.coeffs[:order + 1], val=min(self.val, order + 1))

    def is_zero(self):
        return self.val > self.order

    def to_complex(self):
        return mp.to_complex(self.coeffs)


class IntSeries(_Series):
    """Σ_{n=0}^{order} c_n z^{-n}."""

    __slots__ = ()

    gamma = 0

    def _new(self, coeffs, val=None):
        return IntSeries(coeffs, self.prec, val)

    @classmethod
    def monomial(cls, n, order, prec, c=1):
        coeffs = mp.zeros(order + 1, prec)
        if n <= order:
            coeffs[n] = mp.num(c, prec)
        return cls(coeffs, prec, val=n)

    @classmethod
    def one(cls, order, prec):
        return cls.monomial(0, order, prec)

    def __add__(self, other):
        return _add(self, other, 1)

    def __sub__(self, other):
        return _add(self, other, -1)

    def __neg__(self):
        return self._new(-self.coeffs, self.val)

    def scale(self, c):
        with mp.working(self.prec):
            coeffs = self.coeffs * mp.num(c, self.prec)
        return self._new(coeffs, self.val)

    def as_frac(self):
        """Embed as a FracSeries with integer offset equal to ``val``."""
        v = min(self.val, self.order)
        return FracSeries(v, self.coeffs[v:], self.prec, val=self.val - v)

    def __repr__(self):
        head = ", ".join(str(complex(c)) for c in mp.to_complex(self.coeffs[:4]))
        return f"IntSeries(val={self.val}, order={self.order}, [{head}, ...])"


class FracSeries(_Series):
    """Σ_{n=0}^{order} c_n z^{-γ-n} with complex offset γ."""

    __slots__ = ("gamma",)

    def __init__(self, gamma, coeffs, prec, val=None):
        super().__init__(coeffs, prec, val)
        self.gamma = mp.num(gamma, prec)

    def _new(self, coeffs, val=None, gamma=None):
        return FracSeries(self.gamma if gamma is None else gamma, coeffs, self.prec, val)

    @classmethod
    def monomial(cls, gamma, order, prec, c=1):
        coeffs = mp.zeros(order + 1, prec)
        coeffs[0] = mp.num(c, prec)
        return cls(gamma, coeffs, prec)

    def __add__(self, other):
        return _add(self, other, 1)

    def __sub__(self, other):
        return _add(self, other, -1)

    def __neg__(self):
        return self._new(-self.coeffs, self.val)

    def scale(self, c):
        with mp.working(self.prec):
            coeffs = self.coeffs * mp.num(c, self.prec)
        return self._new(coeffs, self.val)

    def integer_offset(self):
        g = complex(self.gamma)
        if g.imag == 0 and g.real == round(g.real) and round(g.real) >= 0:
            return int(round(g.real))
        return None

    def as_int(self):
        """Inverse of ``IntSeries.as_frac`` (integer offsets only)."""
        g = self.integer_offset()
        if g is None:
            raise ValueError(f"offset {complex(self.gamma)} is not a non-negative integer")
        coeffs = np.concatenate([mp.zeros(g, self.prec), self.coeffs])
        return IntSeries(coeffs, self.prec, val=g + self.val)

    def __repr__(self):
        head = ", ".join(str(complex(c)) for c in mp.to_complex(self.coeffs[:4]))
        return f"FracSeries(gamma={complex(self.gamma)}, val={self.val}, order={self.order}, [{head}, ...])"


def _add(a, b, sign):
    if type(a) is not type(b):
        raise TypeError("cannot add series of different kinds")
    prec = min(a.prec, b.prec)
    if isinstance(a, FracSeries):
        shift = complex(b.gamma - a.gamma)
        if shift != 0:
            if shift.imag != 0 or shift.real != round(shift.real):
                raise ValueError("offsets must differ by an integer")
            s = int(round(shift.real))
            if s > 0:
                b = _pad(b, a.gamma, s)
            else:
                a = _pad(a, b.gamma, -s)
    order = min(a.order, b.order)
    with mp.working(prec):
        coeffs = a.coeffs[:order + 1] + sign * b.coeffs[:order + 1]
    return a._new(coeffs, val=min(a.val, b.val))


def _pad(s, gamma, k):
    """Rewrite s with an offset lowered by the integer k."""
    coeffs = np.concatenate([mp.zeros(k, s.prec), s.coeffs])
    return FracSeries(gamma, coeffs, s.prec, val=s.val + k)


# ------------------------------------------------------------ products

def _conv(a, b, n, prec):
    """First n + 1 coefficients of the Cauchy product of arrays a and b."""
    out = np.convolve(a[:n + 1], b[:n + 1])[:n + 1]
    if len(out) < n + 1:
        out = np.concatenate([out, mp.zeros(n + 1 - len(out), prec)])
    return out


def mul(a, b, order=None):
    """Product of two series; the result is valid to the largest order both inputs determine."""
    if isinstance(a, FracSeries) and isinstance(b, FracSeries):
        with mp.working(min(a.prec, b.prec)):
            kind, gamma = FracSeries, a.gamma + b.gamma
    elif isinstance(a, FracSeries) or isinstance(b, FracSeries):
        kind, gamma = FracSeries, (a.gamma if isinstance(a, FracSeries) else b.gamma)
    else:
        kind, gamma = IntSeries, None
    prec = min(a.prec, b.prec)
    valid = min(a.order + min(b.val, b.order + 1), b.order + min(a.val, a.order + 1))
    if order is not None:
        valid = min(valid, order)
    with mp.working(prec):
        coeffs = _conv(a.coeffs, b.coeffs, valid, prec)
    val = a.val + b.val
    if kind is IntSeries:
        return IntSeries(coeffs, prec, val=val)
    return FracSeries(gamma, coeffs, prec, val=val)


def _require_unit(s):
    tol = 1e-14 if mp.is_double(s.prec) else 2.0 ** (UNIT_TOL_BITS - s.prec)
    if abs(complex(s.coeffs[0]) - 1) > tol:
        raise NonUnitLeadingTerm(f"constant term must be 1, got {complex(s.coeffs[0])}")


def exp(s):
    """exp of an IntSeries with val ≥ 1."""
    if not isinstance(s, IntSeries):
        raise TypeError("exp acts on IntSeries")
    if s.val < 1 and s.coeffs[0] != 0:
        raise NonUnitLeadingTerm("exp needs a series without constant term")
    n = s.order
    with mp.working(s.prec):
        a = s.coeffs
        ja = a * np.arange(n + 1)
        r = mp.zeros(n + 1, s.prec)
        r[0] = mp.num(1, s.prec)
        for k in range(1, n + 1):
            r[k] = np.dot(ja[1:k + 1], r[k - 1::-1]) / k
    return IntSeries(r, s.prec, val=0)


def log(s):
    """log of an IntSeries with constant term 1."""
    if not isinstance(s, IntSeries):
        raise TypeError("log acts on IntSeries")
    _require_unit(s)
    n = s.order
    with mp.working(s.prec):
        a = s.coeffs
        out = mp.zeros(n + 1, s.prec)
        jl = mp.zeros(n + 1, s.prec)
        for k in range(1, n + 1):
            acc = a[k] * k
            if k > 1:
                acc = acc - np.dot(jl[1:k], a[k - 1:0:-1])
            jl[k] = acc
            out[k] = acc / k
    return IntSeries(out, s.prec, val=1)


def log1p(u):
    """log(1 + u) for val(u) ≥ 1."""
    return log(IntSeries.one(u.order, u.prec) + u)


def power(s, alpha):
    """s**alpha = exp(alpha·log s) for s with constant term 1."""
    return exp(log(s).scale(alpha))


def inverse(s):
    """1/s for s with constant term 1."""
    _require_unit(s)
    n = s.order
    with mp.working(s.prec):
        a = s.coeffs
        r = mp.zeros(n + 1, s.prec)
        r[0] = mp.num(1, s.prec)
        for k in range(1, n + 1):
            r[k] = -np.dot(a[1:k + 1], r[k - 1::-1])
    return IntSeries(r, s.prec, val=0)


def derivative(s):
    """d/dz; raises the offset (FracSeries) or the valuation (IntSeries) by one."""
    with mp.working(s.prec):
        if isinstance(s, FracSeries):
            coeffs = -(s.coeffs * (s.gamma + np.arange(s.order + 1)))
            return FracSeries(s.gamma + 1, coeffs, s.prec, val=s.val)
        n = np.arange(s.order + 1)
        coeffs = np.concatenate([mp.zeros(1, s.prec), -(s.coeffs * n)])
        return IntSeries(coeffs, s.prec, val=max(s.val + 1, 2) if s.val >= 1 else 2)


# ------------------------------------------------------------ compositions

def _binomial_column(s, c, n, prec):
    """Coefficients of (1 + c·x)^s up to x^n."""
    out = mp.zeros(n + 1, prec)
    out[0] = mp.num(1, prec)
    for i in range(1, n + 1):
        out[i] = out[i - 1] * (s - (i - 1)) / i * c
    return out


def shift_matrix(gamma, c, size, prec):
    """M with (z + c)^{-γ-j} = Σ_i M[i, j] z^{-γ-i}, for i, j < size."""
    with mp.working(prec):
        gamma = mp.num(gamma, prec)
        c = mp.num(c, prec)
        M = mp.zeros((size, size), prec)
        for j in range(size):
            M[j:, j] = _binomial_column(-gamma - j, c, size - 1 - j, prec)
    return M


def compose_shift(phi, c):
    """φ(z + c); the result has the same kind, offset and order."""
    size = phi.order + 1
    M = shift_matrix(phi.gamma, c, size, phi.prec)
    with mp.working(phi.prec):
        coeffs = M @ phi.coeffs
    return phi._new(coeffs, val=phi.val)


class Composer:
    """Cached matrices for φ ↦ φ∘(id + b) with val(b) ≥ 1.

    Column j of the matrix for offset γ holds the coefficients of
    x^j (1 + x b)^{-γ-j}, i.e. the image of z^{-γ-j}.  Summing the Taylor
    series Σ φ^{(j)} b^j / j! gives the same numbers; the column form needs
    one power and a chain of products per offset and is reused for every
    application.
    """

    def __init__(self, b, size=None):
        if b.val < 1 and not b.is_zero():
            raise ValueError("composition needs val(b) ≥ 1")
        self.b = b
        self.prec = b.prec
        self.u_order = b.order + 1
        self.size = size or (self.u_order + 4)
        self._cache = {}

    def _u(self):
        coeffs = mp.zeros(self.size, self.prec)
        n = min(self.size - 1, self.u_order)
        coeffs[1:n + 1] = self.b.coeffs[:n]
        return IntSeries(coeffs, self.prec, val=2)

    def matrix(self, gamma):
        key = tuple(mp.to_pair(mp.num(gamma, self.prec), self.prec))
        M = self._cache.get(key)
        if M is not None:
            return M
        prec, size = self.prec, self.size
        with mp.working(prec):
            g = mp.num(gamma, prec)
            one_plus_u = IntSeries.one(size - 1, prec) + self._u()
            col = power(one_plus_u, -g) if g != 0 else IntSeries.one(size - 1, prec)
            inv = inverse(one_plus_u)
            M = mp.zeros((size, size), prec)
            for j in range(size):
                M[j:, j] = col.coeffs[:size - j]
                if j + 1 < size:
                    col = mul(col.truncate(size - j - 2), inv.truncate(size - j - 2))
        self._cache[key] = M
        return M

    def _first_active(self, phi):
        """First column whose image is not exactly the monomial itself."""
        j0 = phi.val
        if isinstance(phi, IntSeries) and j0 == 0:
            j0 = 1
        return j0

    def apply(self, phi, minus_identity=False):
        """φ∘(id + b), or φ∘(id + b) − φ when ``minus_identity``."""
        if self.b.is_zero():
            if minus_identity:
                return phi._new(mp.zeros(phi.order + 3, phi.prec), val=phi.order + 3)
            return phi
        j0 = self._first_active(phi)
        if minus_identity:
            order = min(phi.order + 2, self.u_order + j0)
        else:
            order = min(phi.order, self.u_order + j0)
        order = min(order, self.size - 1)
        M = self.matrix(phi.gamma)
        with mp.working(self.prec):
            x = mp.zeros(order + 1, self.prec)
            k = min(order, phi.order) + 1
            x[:k] = phi.coeffs[:k]
            out = M[:order + 1, :order + 1] @ x
            if minus_identity:
                out = out - x
        val = phi.val + 2 if minus_identity else phi.val
        return phi._new(out, val=val)


def compose_id_plus(phi, b):
    """φ(z + b(z)) for val(b) ≥ 1."""
    return Composer(b, size=max(phi.order, b.order) + 6).apply(phi)


def shift_minus_identity(phi, c=-1):
    """φ(z + c) − φ(z); valid one order beyond φ."""
    order = phi.order + 1
    M = shift_matrix(phi.gamma, c, order + 1, phi.prec)
    with mp.working(phi.prec):
        x = np.concatenate([phi.coeffs, mp.zeros(1, phi.prec)])
        out = M @ x - x
    return phi._new(out, val=phi.val + 1)


# ------------------------------------------------------------ JSON

def to_json(s):
    prec = s.prec
    gamma = s.gamma if isinstance(s, FracSeries) else mp.num(0, prec)
    return {
        "gamma": mp.to_pair(gamma, prec),
        "coeffs": [mp.to_pair(c, prec) for c in s.coeffs],
        "valid_order": s.order,
        "kind": "frac" if isinstance(s, FracSeries) else "int",
        "precision": prec,
    }


def from_json(d, prec=None):
    if isinstance(d, str):
        d = json.loads(d)
    prec = prec or int(d.get("precision", 160))
    coeffs = [mp.from_pair(c, prec) for c in d["coeffs"]]
    order = int(d.get("valid_order", len(coeffs) - 1))
    coeffs = coeffs[:order + 1]
    if d.get("kind", "frac") == "int":
        return IntSeries(coeffs, prec)
    return FracSeries(mp.from_pair(d["gamma"], prec), coeffs, prec)
