from hypothesis import given
from hypothesis import strategies as st

from resurge import fixed, mp

ints = st.integers(-(1 << 80), 1 << 80)


@given(st.complex_numbers(max_magnitude=1e6, allow_nan=False, allow_infinity=False))
def test_round_trip(z):
    re, im = fixed.to_fixed(z, 80)
    back = complex(fixed.from_fixed(re, im, 80, mp.DOUBLE))
    assert abs(back - z) <= 2.0 ** -79 + 1e-16 * abs(z)


@given(ints, ints, ints, ints)
def test_cmul_matches_exact_product(a, b, c, d):
    shift = 60
    got = fixed.cmul((a, b), (c, d), shift)
    exact_re = (a * c - b * d) / 2 ** shift
    exact_im = (a * d + b * c) / 2 ** shift
    assert abs(got[0] - exact_re) <= 1 and abs(got[1] - exact_im) <= 1


@given(st.lists(st.tuples(ints, ints), min_size=6, max_size=6), st.lists(st.tuples(ints, ints), min_size=6, max_size=6))
def test_matmul_matches_acb(A, B):
    shift = 64
    Ma = fixed.FixedCMat.from_pairs(2, 3, [a[0] for a in A], [a[1] for a in A], shift)
    Mb = fixed.FixedCMat.from_pairs(3, 2, [b[0] for b in B], [b[1] for b in B], shift)
    out = (Ma @ Mb).rescale(shift)
    re, im = out.pairs()
    # exact reference in Python integers, rounded once at the end
    for i in range(2):
        for j in range(2):
            r = sum(A[i * 3 + t][0] * B[t * 2 + j][0] - A[i * 3 + t][1] * B[t * 2 + j][1] for t in range(3))
            m = sum(A[i * 3 + t][0] * B[t * 2 + j][1] + A[i * 3 + t][1] * B[t * 2 + j][0] for t in range(3))
            assert abs(r - (re[i * 2 + j] << shift)) <= 1 << (shift - 1)
            assert abs(m - (im[i * 2 + j] << shift)) <= 1 << (shift - 1)
