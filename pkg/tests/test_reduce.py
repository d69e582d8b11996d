from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from liesym.expr import CHI, JetVar, Poly, T, X, expand
from liesym.parser import parse
from liesym.prolong import VectorField
from liesym.reduce import (
    ReducedODE, ReductionError, UnsupportedGenerator, UnsupportedODE, invariants,
    jacobian_rank, proportional, reduce_pde, solve_linear_first_order,
)
from liesym.verify import residual_rational

V1 = VectorField.from_strings("1")
V2 = VectorField.from_strings("0", "1")
V3 = VectorField.from_strings("t", "0", "1/a")


def E(text):
    return expand(parse(text))


def gen(text):
    return VectorField.from_strings(*[s.strip() for s in text.split(";")])


@pytest.mark.parametrize("v,chi,zeta", [
    (V3, "t", "u - x/(a*t)"),
    (V2 + V1.scale(E("c0")), "x - c0*t", "u"),
    (V3 + V2.scale(E("beta")), "x - t^2/(2*beta)", "u - t/(a*beta)"),
    (V2, "x", "u"),
    (V1, "t", "u"),
])
def test_invariants(v, chi, zeta):
    inv = invariants(v)
    assert inv.chi == E(chi) and inv.zeta == E(zeta)
    assert v(inv.chi).is_zero() and v(inv.zeta).is_zero()
    assert jacobian_rank(inv, {"x": Fraction(3), "t": Fraction(5), "u": Fraction(7),
                               "a": Fraction(2), "c0": Fraction(3), "beta": Fraction(5)}) == 2


@pytest.mark.parametrize("v", [
    VectorField.from_strings("0", "0", "1"),
    VectorField(),
    VectorField.from_strings("x"),
    VectorField.from_strings("1", "t"),
    VectorField.from_strings("t^2"),
    VectorField.from_strings("1", "0", "u"),
    VectorField.from_strings("1", "1 + a"),
])
def test_unsupported(v):
    with pytest.raises(UnsupportedGenerator):
        invariants(v)


@pytest.mark.parametrize("v,ode", [
    (V3, "zeta_chi + zeta/chi"),
    (V2 + V1.scale(E("c0")), "-c0*zeta_chi + a*zeta*zeta_chi + b*zeta_chi3 + c*zeta_chi4 + d*zeta_chi5 - e*zeta_chi2"),
    (V2, "a*zeta*zeta_chi + b*zeta_chi3 + c*zeta_chi4 + d*zeta_chi5 - e*zeta_chi2"),
    (V1, "zeta_chi"),
])
def test_reference_reductions(tube, v, ode):
    red = reduce_pde(tube, invariants(v))
    assert proportional(red.expr, E(ode))
    assert not red.expr.variables() & {X, T}


def test_mixed_reduction_cancels_explicit_time(tube):
    red = reduce_pde(tube, invariants(V3 + V2.scale(E("beta"))))
    assert red.expr == E("1/(a*beta) + a*zeta*zeta_chi + b*zeta_chi3 + c*zeta_chi4 + d*zeta_chi5 - e*zeta_chi2")
    assert red.notes and "cancel" in red.notes[0]
    assert "beta = 0" in red.singular and "a = 0" in red.singular
    assert red.order == 5


def test_leftover_coordinates_are_reported(tube):
    # the boost without the 1/a leaves x/t^2 terms behind
    inv = invariants(VectorField.from_strings("t", "0", "1"))
    with pytest.raises(ReductionError, match="explicit"):
        reduce_pde(tube, inv)


def test_proportional():
    assert proportional(E("2*a*zeta"), E("zeta"))
    assert not proportional(E("chi*zeta"), E("zeta"))
    assert not proportional(E("zeta + 1"), E("zeta"))
    assert proportional(Poly(), Poly())


def _ode(text):
    inv = invariants(V3)
    return ReducedODE(E(text), inv)


def test_first_order_solutions(tube):
    sol = solve_linear_first_order(reduce_pde(tube, invariants(V3)))
    assert sol.zeta == E("c1/chi")
    assert residual_rational(sol.u, tube).is_zero()
    from liesym.verify import to_rational
    assert (to_rational(sol.u) - to_rational(parse("(x + a*c1)/(a*t)"))).is_zero()

    s = solve_linear_first_order(reduce_pde(tube, invariants(V1)))
    assert s.zeta == E("c1") and expand(s.u) == E("c1")
    assert solve_linear_first_order(_ode("zeta_chi + 2*zeta/chi")).zeta == E("c1/chi^2")
    assert solve_linear_first_order(_ode("3*zeta_chi - 6*zeta/chi")).zeta == E("c1*chi^2")


@pytest.mark.parametrize("text", [
    "zeta_chi2 + zeta", "zeta_chi + zeta^2", "zeta_chi + chi*zeta", "zeta_chi + zeta/(2*chi)",
    "zeta + 1", "zeta_chi + 1",
])
def test_unsupported_odes(text):
    with pytest.raises(UnsupportedODE):
        solve_linear_first_order(_ode(text))


@settings(max_examples=40, deadline=None)
@given(st.integers(-4, 4).filter(bool))
def test_power_law_round_trip(k):
    sol = solve_linear_first_order(_ode(f"zeta_chi + ({k})*zeta/chi"))
    z = sol.zeta
    assert (z.diff(CHI) + z * Poly.var(CHI, -1).scale(k)).is_zero()
