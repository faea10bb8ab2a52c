import cmath
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from resurge import paths
from resurge.errors import PathThroughOrigin, PathTooCloseToLattice

TWO_PI = 2 * math.pi


def test_segment_gamma_endpoints_are_exact():
    g = paths.segment_gamma_m(3)
    assert g.exact[-1] == (1, 3)
    assert g.vertices[-1] == complex(1, 3 * TWO_PI)


def test_gamma_tilde_runs_from_origin_to_omega():
    g = paths.gamma_tilde(paths.segment_gamma_m(1), 2j * math.pi)
    assert g.from_origin
    assert g.vertices[0] == 0 and g.vertices[1] == 1
    assert g.vertices[-1] == complex(0, TWO_PI)
    assert g.terminal == complex(0, TWO_PI)


@pytest.mark.parametrize("m", [1, -1, 2, -3])
def test_lift_matches_principal_argument_on_straight_path(m):
    g = paths.gamma_tilde(paths.segment_gamma_m(m), complex(0, TWO_PI * m))
    for s in (0.3, g.length / 2, g.length * 0.99):
        r, a = g.lifted(s)
        z = g.point(s)
        assert abs(r - abs(z)) < 1e-12
        assert abs(a - cmath.phase(z)) < 1e-12


def test_loop_adds_a_full_turn_around_omega():
    omega = complex(0, TWO_PI)
    lp = paths.loop_path(paths.segment_gamma_m(1), omega, 0.3 * cmath.exp(0.7j))
    # the loop goes around ω, not around 0, so the lift comes back to the same sheet of log ζ
    assert abs(lp.lifts[-1] - cmath.phase(lp.vertices[-1])) < 1e-12


def test_detour_differs_from_straight_only_in_shape():
    a = paths.segment_gamma_m(1)
    b = paths.detour_gamma_m(1)
    assert a.vertices[0] == b.vertices[0] and a.vertices[-1] == b.vertices[-1]
    assert b.length > a.length


def test_rejects_lattice_crossing():
    with pytest.raises(PathTooCloseToLattice):
        paths.polyline([complex(1, TWO_PI + 0.1), complex(-1, TWO_PI - 0.1)])


def test_rejects_path_through_origin():
    with pytest.raises(PathThroughOrigin):
        paths.polyline([1, -1])


@given(st.floats(0.3, 3.0))
def test_winding_counts_turns(r):
    # a closed square around 0 adds one turn to the lift
    vs = [complex(r, 0), complex(r, r), complex(-r, r), complex(-r, -r), complex(r, -r), complex(r, 0)]
    p = paths.PathLog(tuple(vs), 0.0, 0.0)
    assert p.winding() == 1


def test_lattice_index():
    assert paths.lattice_index(complex(0, -2 * TWO_PI)) == -2
    with pytest.raises(ValueError):
        paths.lattice_index(1j)
