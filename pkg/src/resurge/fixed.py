"""Fixed-point complex matrices on top of flint's integer matrices.

A matrix holds integer real and imaginary parts with a common binary
scale: value = (re + i·im)·2^-shift.  Products use three integer matrix
multiplications.  This is much faster than ball-matrix products when the
entries span a wide range of magnitudes (power tables, graded grids), and
the error is absolute: 2^-shift per entry and operation.
"""

import flint
import gmpy2

from . import mp


def _to_int(x, shift):
    """round(x·2^shift) for a real backend scalar, arb or float."""
    if isinstance(x, flint.arb):
        man, e = x.mid().man_exp()
        man, e = int(man), int(e) + shift
        return man << e if e >= 0 else (man + (1 << (-e - 1))) >> -e
    if isinstance(x, mp.MPFR):
        if not x:
            return 0
        man, e = x.as_mantissa_exp()
        man, e = int(man), int(e) + shift
        return man << e if e >= 0 else (man + (1 << (-e - 1))) >> -e
    if not x:
        return 0
    m, e = gmpy2.mpfr(float(x), 53).as_mantissa_exp()
    man, e = int(m), int(e) + shift
    return man << e if e >= 0 else (man + (1 << (-e - 1))) >> -e


def to_fixed(z, shift):
    """(re, im) integers of a complex backend scalar or acb at ``shift``."""
    if isinstance(z, flint.acb):
        return _to_int(z.real, shift), _to_int(z.imag, shift)
    if isinstance(z, mp.MPC):
        return _to_int(z.real, shift), _to_int(z.imag, shift)
    z = complex(z)
    return _to_int(z.real, shift), _to_int(z.imag, shift)


def from_fixed(re, im, shift, prec):
    """Backend scalar from integer parts at ``shift``."""
    if mp.is_double(prec):
        return complex(float(gmpy2.mul_2exp(gmpy2.mpfr(re, 64 + re.bit_length()), -shift)),
                       float(gmpy2.mul_2exp(gmpy2.mpfr(im, 64 + im.bit_length()), -shift)))
    with mp.working(prec):
        return gmpy2.mpc(gmpy2.mul_2exp(gmpy2.mpfr(re), -shift), gmpy2.mul_2exp(gmpy2.mpfr(im), -shift))


def fixed_to_acb(re, im, shift):
    return flint.acb(flint.arb((re, -shift)) if re else flint.arb(0),
                     flint.arb((im, -shift)) if im else flint.arb(0))


class FixedCMat:
    def __init__(self, re, im, shift):
        self.re = re
        self.im = im
        self.shift = shift

    @classmethod
    def from_pairs(cls, nrows, ncols, re, im, shift):
        return cls(flint.fmpz_mat(nrows, ncols, re), flint.fmpz_mat(nrows, ncols, im), shift)

    @classmethod
    def from_values(cls, nrows, ncols, values, shift):
        """From a flat row-major list of complex scalars (backend or acb)."""
        re, im = [], []
        for v in values:
            a, b = to_fixed(v, shift)
            re.append(a)
            im.append(b)
        return cls.from_pairs(nrows, ncols, re, im, shift)

    @property
    def shape(self):
        return self.re.nrows(), self.re.ncols()

    def __matmul__(self, other):
        t1 = self.re * other.re
        t2 = self.im * other.im
        t3 = (self.re + self.im) * (other.re + other.im)
        return FixedCMat(t1 - t2, t3 - t1 - t2, self.shift + other.shift)

    def transpose(self):
        return FixedCMat(self.re.transpose(), self.im.transpose(), self.shift)

    def pairs(self):
        """Row-major lists of Python ints (re, im)."""
        return [int(v) for v in self.re.entries()], [int(v) for v in self.im.entries()]

    def rescale(self, shift):
        """Same values at a new scale (rounding when the scale shrinks)."""
        d = self.shift - shift
        if d == 0:
            return self
        re, im = self.pairs()
        if d > 0:
            half = 1 << (d - 1)
            re = [(v + half) >> d for v in re]
            im = [(v + half) >> d for v in im]
        else:
            re = [v << -d for v in re]
            im = [v << -d for v in im]
        n, m = self.shape
        return FixedCMat.from_pairs(n, m, re, im, shift)


def cmul(a, b, shift):
    """Product of two fixed complex scalars given as (re, im) at ``shift``."""
    ar, ai = a
    br, bi = b
    half = 1 << (shift - 1)
    return (ar * br - ai * bi + half) >> shift, (ar * bi + ai * br + half) >> shift
