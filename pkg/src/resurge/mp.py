"""Numeric backend.

Two modes share one code path.  At ``prec == 53`` numbers are Python
complex values and arrays are ``complex128``; above that, numbers are
``gmpy2.mpc`` at ``prec`` bits and arrays are numpy object arrays of them.
Array code uses only ``+ - * / @`` so it runs unchanged in both modes;
transcendental functions go through the helpers below.
"""

import cmath
import math
from contextlib import nullcontext
from fractions import Fraction

import flint
import gmpy2
import mpmath
import numpy as np

DOUBLE = 53
MPC = type(gmpy2.mpc(0))
MPFR = type(gmpy2.mpfr(0))


def is_double(prec):
    return prec <= DOUBLE


def check_prec(prec):
    prec = int(prec)
    if prec < DOUBLE:
        raise ValueError(f"precision must be at least {DOUBLE} bits, got {prec}")
    return prec


def working(prec):
    """Context manager that sets the gmpy2 precision for a computation."""
    if is_double(prec):
        return nullcontext()
    return gmpy2.context(gmpy2.get_context(), precision=prec, allow_complex=True)


def num(x, prec):
    """Convert a scalar (int, float, complex, Fraction, str, mpc, mpf) to the backend type."""
    if is_double(prec):
        if isinstance(x, Fraction):
            return complex(float(x))
        if isinstance(x, str):
            return complex(x.replace(" ", ""))
        if isinstance(x, (mpmath.mpf, mpmath.mpc)):
            return complex(x)
        return complex(x)
    with working(prec):
        if isinstance(x, Fraction):
            return gmpy2.mpc(gmpy2.mpfr(gmpy2.mpq(x.numerator, x.denominator)))
        if isinstance(x, str):
            return gmpy2.mpc(x.replace(" ", ""))
        if isinstance(x, mpmath.mpf):
            return gmpy2.mpc(_from_mpmath_real(x))
        if isinstance(x, mpmath.mpc):
            return gmpy2.mpc(_from_mpmath_real(x.real), _from_mpmath_real(x.imag))
        if isinstance(x, MPC):
            return gmpy2.mpc(x)
        return gmpy2.mpc(x)


def real(x, prec):
    """A real scalar in the backend (float or mpfr)."""
    if is_double(prec):
        return float(x)
    with working(prec):
        if isinstance(x, Fraction):
            return gmpy2.mpfr(gmpy2.mpq(x.numerator, x.denominator))
        return gmpy2.mpfr(x)


def array(values, prec):
    values = list(values)
    if is_double(prec):
        return np.array([num(v, prec) for v in values], dtype=complex)
    out = np.empty(len(values), dtype=object)
    for i, v in enumerate(values):
        out[i] = num(v, prec)
    return out


def zeros(shape, prec):
    if is_double(prec):
        return np.zeros(shape, dtype=complex)
    with working(prec):
        return np.full(shape, gmpy2.mpc(0), dtype=object)


def convert(arr, prec):
    """Re-express an array (either mode) at precision ``prec``."""
    arr = np.asarray(arr)
    if is_double(prec):
        return np.array(arr.tolist(), dtype=complex) if arr.dtype == object else arr.astype(complex)
    out = np.empty(arr.shape, dtype=object)
    with working(prec):
        flat = out.reshape(-1)
        for i, v in enumerate(arr.reshape(-1)):
            flat[i] = gmpy2.mpc(v)
    return out


def pi(prec):
    if is_double(prec):
        return math.pi
    with working(prec):
        return gmpy2.const_pi()


def two_pi_i(prec):
    return 2 * pi(prec) * 1j if is_double(prec) else gmpy2.mpc(0, 2 * pi(prec))


def _is_mp(x):
    return isinstance(x, (MPC, MPFR))


def _unary(name, cfun):
    gfun = getattr(gmpy2, name)
    vec = np.frompyfunc(gfun, 1, 1)

    def f(x):
        # results keep the precision of the argument even outside ``working``
        if isinstance(x, np.ndarray):
            if x.dtype == object:
                with working(max(gmpy2.get_context().precision, precision_of(x))):
                    return vec(x)
            return getattr(np, name)(x.astype(complex))
        if _is_mp(x):
            with working(max(gmpy2.get_context().precision, precision_of(x))):
                return gfun(x)
        return cfun(x)

    f.__name__ = name
    return f


exp = _unary("exp", cmath.exp)
log = _unary("log", cmath.log)
sqrt = _unary("sqrt", cmath.sqrt)
sin = _unary("sin", cmath.sin)
cos = _unary("cos", cmath.cos)


def expm1(x):
    """e^x − 1 without cancellation near 0."""
    if isinstance(x, np.ndarray):
        if x.dtype == object:
            return np.frompyfunc(expm1, 1, 1)(x)
        out = np.expm1(x.real) * np.cos(x.imag) - 2 * np.sin(x.imag / 2) ** 2 + 1j * np.exp(x.real) * np.sin(x.imag)
        return out
    if _is_mp(x):
        with working(precision_of(x)):
            x = gmpy2.mpc(x)
            er = gmpy2.expm1(x.real)
            s = gmpy2.sin(x.imag / 2)
            return gmpy2.mpc(er * gmpy2.cos(x.imag) - 2 * s * s, (er + 1) * gmpy2.sin(x.imag))
    z = complex(x)
    return complex(math.expm1(z.real) * math.cos(z.imag) - 2 * math.sin(z.imag / 2) ** 2,
                   math.exp(z.real) * math.sin(z.imag))


def phase(x):
    if _is_mp(x):
        with working(precision_of(x)):
            return gmpy2.phase(gmpy2.mpc(x))
    return cmath.phase(x)


def absval(x):
    """|x| as float (for diagnostics, bounds and comparisons)."""
    if isinstance(x, np.ndarray):
        if x.dtype == object:
            return np.array([float(abs(v)) for v in x.reshape(-1)]).reshape(x.shape)
        return np.abs(x)
    return float(abs(x))


def to_complex(x):
    if isinstance(x, np.ndarray):
        return np.array(x.tolist(), dtype=complex) if x.dtype == object else x.astype(complex)
    return complex(x)


def precision_of(x):
    if isinstance(x, np.ndarray):
        if x.dtype == object and x.size:
            return max(x.reshape(-1)[0].precision)
        return DOUBLE
    if isinstance(x, MPC):
        return max(x.precision)
    if isinstance(x, MPFR):
        return x.precision
    return DOUBLE


# ---------------------------------------------------------------- mpmath bridge

def _from_mpmath_real(x):
    # man_exp drops the sign, so read the raw (sign, man, exp, bc) tuple
    sign, man, e, _bc = x._mpf_
    if not man:
        return gmpy2.mpfr(0)
    return gmpy2.mul_2exp(gmpy2.mpfr(-int(man) if sign else int(man)), int(e))


def _to_mpmath_real(x):
    if not x:
        return mpmath.mpf(0)
    man, e = (x if isinstance(x, MPFR) else gmpy2.mpfr(x)).as_mantissa_exp()
    return mpmath.mpf((int(man), int(e)))


def to_mpmath(x):
    if _is_mp(x):
        with working(precision_of(x)):
            x = gmpy2.mpc(x)
        return mpmath.mpc(_to_mpmath_real(x.real), _to_mpmath_real(x.imag))
    return mpmath.mpc(complex(x))


def from_mpmath(x, prec):
    return num(x if isinstance(x, mpmath.mpc) else mpmath.mpc(x), prec)


# ---------------------------------------------------------------- text form

def digits(prec):
    return int(math.ceil(prec * math.log10(2))) + 2


def fmt_real(x, prec):
    if is_double(prec):
        return repr(float(x))
    with working(prec):
        return format(gmpy2.mpfr(x), f".{digits(prec)}g")


def to_pair(x, prec):
    """Complex scalar as a pair of decimal strings [re, im]."""
    if _is_mp(x):
        with working(max(prec, precision_of(x))):
            x = gmpy2.mpc(x)
            return [fmt_real(x.real, prec), fmt_real(x.imag, prec)]
    z = complex(x)
    return [fmt_real(z.real, prec), fmt_real(z.imag, prec)]


def from_pair(v, prec):
    """Inverse of ``to_pair``; also accepts plain numbers and strings."""
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise ValueError(f"complex pair must have two entries, got {v!r}")
        re, im = v
        if is_double(prec):
            return complex(float(re), float(im))
        with working(prec):
            return gmpy2.mpc(gmpy2.mpfr(str(re)), gmpy2.mpfr(str(im)))
    if isinstance(v, bool):
        raise ValueError("booleans are not numbers")
    if isinstance(v, (int, float, str)):
        return num(v if not isinstance(v, float) else repr(v), prec) if not is_double(prec) else complex(v)
    raise ValueError(f"cannot read a complex number from {v!r}")


# ---------------------------------------------------------------- linear algebra

def solve(A, B):
    """Solve A X = B by Gaussian elimination with partial pivoting.

    Uses LAPACK for complex128 input and plain elimination for object arrays.
    """
    if A.dtype != object:
        return np.linalg.solve(A.astype(complex), np.asarray(B).astype(complex))
    n = A.shape[0]
    A = A.copy()
    vec = B.ndim == 1
    X = B.reshape(n, -1).copy()
    for c in range(n):
        p = c + int(np.argmax([abs(v) for v in A[c:, c]]))
        if A[p, c] == 0:
            raise ZeroDivisionError("singular matrix")
        if p != c:
            A[[c, p]] = A[[p, c]]
            X[[c, p]] = X[[p, c]]
        inv = 1 / A[c, c]
        f = A[c + 1:, c] * inv
        if len(f):
            A[c + 1:, c:] = A[c + 1:, c:] - np.outer(f, A[c, c:])
            X[c + 1:] = X[c + 1:] - np.outer(f, X[c])
    for c in range(n - 1, -1, -1):
        if c + 1 < n:
            X[c] = X[c] - A[c, c + 1:] @ X[c + 1:]
        X[c] = X[c] / A[c, c]
    return X[:, 0] if vec else X


# ---------------------------------------------------------------- ball-arithmetic bridge
# Dense matrix products at high precision go through python-flint; only
# midpoints are used, the radii are ignored.

class flint_working:
    """Context manager setting python-flint's working precision."""

    def __init__(self, prec):
        self.prec = int(prec)

    def __enter__(self):
        self.saved = flint.ctx.prec
        flint.ctx.prec = self.prec
        return self

    def __exit__(self, *exc):
        flint.ctx.prec = self.saved
        return False


def _arb_of(x):
    if isinstance(x, MPFR):
        if not x:
            return flint.arb(0)
        man, e = x.as_mantissa_exp()
        return flint.arb((int(man), int(e)))
    return flint.arb(float(x))


def to_acb(x):
    if isinstance(x, flint.acb):
        return x
    if isinstance(x, MPFR):
        return flint.acb(_arb_of(x))
    if _is_mp(x):
        return flint.acb(_arb_of(x.real), _arb_of(x.imag))
    z = complex(x)
    return flint.acb(z.real, z.imag)


def _mpfr_of(a, prec):
    man, e = a.mid().man_exp()
    with working(prec):
        return gmpy2.mul_2exp(gmpy2.mpfr(int(man)), int(e)) if man else gmpy2.mpfr(0)


def from_acb(x, prec):
    """Midpoint of an acb ball as a backend scalar."""
    if is_double(prec):
        return complex(float(x.real.mid()), float(x.imag.mid()))
    with working(prec):
        return gmpy2.mpc(_mpfr_of(x.real, prec), _mpfr_of(x.imag, prec))


def acb_matrix(rows):
    """acb_mat from a 2-D array or nested list of backend scalars."""
    rows = [list(r) for r in rows]
    nr = len(rows)
    nc = len(rows[0]) if nr else 0
    return flint.acb_mat(nr, nc, [to_acb(v) for r in rows for v in r])


def acb_column(values):
    values = list(values)
    return flint.acb_mat(len(values), 1, [to_acb(v) for v in values])


def from_acb_column(m, prec):
    return array([from_acb(m[i, 0], prec) for i in range(m.nrows())], prec)
