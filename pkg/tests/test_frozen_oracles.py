"""Values frozen from earlier runs at 160 bits; any drift is a regression."""

import math

import pytest

RHO0_S = [complex(-4 * math.pi ** 2, 0),
          complex(-318.27756369511815, 97.92475190871066),
          complex(1419.3459942451889, 1308.3575059170205)]
RHO0_A_LOW = complex(-18.45606924294145, -11.669721373897861)
QUAD_TOTAL = complex(-0.05895043056440687, -0.010009865898273724)
QUAD_S_N2 = [complex(-1.1073241580870254, 0.971289717968984),
             complex(3.7417910689375313, -0.8820090244022956),
             complex(-3.62178228676376, -2.4600029799603678)]


def _rel(a, b):
    return abs(complex(a) - b) / abs(b)


@pytest.mark.parametrize("k", range(3))
def test_rho0_levels(ctx, k):
    assert _rel(ctx.residua("rho0", 1).S[k], RHO0_S[k]) < 1e-12


def test_rho0_invariant(ctx):
    res = ctx.residua("rho0", 1)
    assert res.horn == "low"
    assert _rel(res.A, RHO0_A_LOW) < 1e-12


def test_quad_total(ctx):
    assert _rel(ctx.residua("quad", 1).total, QUAD_TOTAL) < 1e-12


@pytest.mark.parametrize("k", range(3))
def test_quad_levels_with_shifted_split(ctx, k):
    res = ctx.residua("quad", 1, N=2, tag="N2")
    assert res.meta["N"] == 2
    assert _rel(res.S[k], QUAD_S_N2[k]) < 1e-12
