import csv
import math
from fractions import Fraction

import numpy as np
import pytest
import scipy.special
from hypothesis import given, settings
from hypothesis import strategies as st

from liesym.expr import T, X, expand, param
from liesym.parser import parse
from liesym.presets import PRESETS
from liesym.determine import EvolutionPDE
from liesym.reduce import ReducedODE, invariants, reduce_pde
from liesym.prolong import VectorField
from liesym.verify import (
    DomainError, Grid, dump_residuals_csv, ellipk, fd_derivative, fd_weights,
    is_exact_solution, jacobi_sn, jacobi_sncndn, residual_numeric, residual_ode,
    residual_rational, residual_symbolic, sn_ansatz, to_rational, transform_solution,
)

SOL = "(x + a*c1)/(a*t)"
PARAMS = {"a": 2, "b": 3, "c": 5, "d": 7, "e": 11, "c1": 1}
GRID = Grid(0, 1, 1, 2, 100, 100)


def same(e1, e2):
    return (to_rational(e1) - to_rational(e2)).is_zero()


class TestExactResiduals:
    def test_examples(self, tube):
        assert expand(residual_symbolic(SOL, tube)).is_zero()
        assert expand(residual_symbolic("7", tube)).is_zero()
        assert expand(residual_symbolic("x", tube)) == expand(parse("a*x"))

    def test_denominators_are_cleared(self, tube):
        r = residual_rational("1/(x + t)", tube)
        assert not r.is_zero()
        assert r.den and expand(residual_symbolic("1/(x + t)", tube)) == r.numerator()

    def test_burgers_shock_profile(self, burgers):
        # u = (x + c)/t solves u_t + u u_x = u_xx for every c
        assert is_exact_solution("(x + c0)/t", burgers)
        assert not is_exact_solution("(x + c0)/t^2", burgers)

    def test_rejects_jets(self, tube):
        with pytest.raises(ValueError):
            residual_rational("u_x", tube)

    @pytest.mark.parametrize("g", ["G1", "G2", "G3"])
    def test_symmetry_preservation(self, tube, g):
        for f in (SOL, "7", "c1/t + x/(a*t)"):
            assert is_exact_solution(transform_solution(g, "s", f), tube)

    def test_transform_examples(self):
        assert same(transform_solution("G3", "s", SOL), SOL)
        assert same(transform_solution("G1", 0, SOL), SOL)
        assert same(transform_solution("G2", "s", "5"), "5")
        assert same(transform_solution("G1", "s", "x*t"), "(x - s)*t")
        assert same(transform_solution("G2", 2, "x*t"), "x*(t - 2)")
        with pytest.raises(ValueError):
            transform_solution("G4", 1, SOL)

    def test_transform_callables(self):
        f = lambda x, t: x * t
        assert transform_solution("G1", 1.0, f)(3.0, 2.0) == 4.0
        assert transform_solution("G2", 1.0, f)(3.0, 2.0) == 3.0
        assert transform_solution("G3", 1.0, f, a=2)(3.0, 2.0) == pytest.approx(2.5)
        with pytest.raises(ValueError):
            transform_solution("G3", 1.0, f)

    def test_transform_matches_generator_flow(self, tube_basis):
        # exp(s*v) maps (x, t, u) -> (x + s*xi, t + s*eta, u + s*phi) for these generators
        x0, t0, s = Fraction(3, 7), Fraction(5, 3), Fraction(2, 5)
        f = parse(SOL)
        vals = {"a": Fraction(2), "c1": Fraction(1)}
        for g, v in zip(("G1", "G2", "G3"), tube_basis.fields):
            pt = {"x": x0, "t": t0, "s": s, **vals}
            xi, eta, phi = (c.evaluate(pt) for c in v.components)
            u0 = to_rational(f).evaluate(pt)
            moved = {"x": x0 + s * xi, "t": t0 + s * eta, "s": s, **vals}
            assert to_rational(transform_solution(g, "s", f)).evaluate(moved) == u0 + s * phi


class TestNumeric:
    def test_flagship_solution(self, tube):
        rep = residual_numeric(SOL, tube, GRID, PARAMS)
        assert rep.symbolic_zero and rep.max_abs < 1e-12
        assert rep.points_evaluated == 10_000

    def test_constant_and_linear(self, tube):
        assert residual_numeric("3", tube, GRID, PARAMS).max_abs == 0
        rep = residual_numeric("x", tube, GRID, PARAMS)
        assert rep.max_abs == pytest.approx(PARAMS["a"] * GRID.x_max)
        assert not rep.symbolic_zero

    def test_callable_uses_finite_differences(self, tube):
        rep = residual_numeric(lambda x, t: (x + 2) / (2 * t), tube, GRID, PARAMS)
        assert rep.truncation_order == 4
        assert rep.max_abs < 1e-4

    def test_singular_locus_is_rejected(self, tube):
        with pytest.raises(DomainError):
            residual_numeric(SOL, tube, Grid(0, 1, -1, 1, 20, 20), PARAMS)
        with pytest.raises(DomainError):
            residual_numeric(SOL, tube, Grid(0, 1, 0.01, 1, 20, 20), PARAMS)

    def test_nan_is_an_error(self, tube):
        with pytest.raises(FloatingPointError):
            residual_numeric(lambda x, t: np.full_like(x, np.nan), tube, GRID, PARAMS)

    def test_grid_validation(self):
        with pytest.raises(ValueError):
            Grid(0, 1, 0, 1, 4, 10)
        with pytest.raises(ValueError):
            Grid(1, 0, 0, 1, 10, 10)
        assert Grid.parse("0,1,1,2,10,12") == Grid(0.0, 1.0, 1.0, 2.0, 10, 12)

    def test_csv_dump(self, tube, tmp_path):
        rep = residual_numeric(SOL, tube, Grid(0, 1, 1, 2, 8, 9), PARAMS)
        path = tmp_path / "r.csv"
        dump_residuals_csv(rep, path)
        rows = list(csv.reader(open(path)))
        assert rows[0] == ["x", "t", "residual"] and len(rows) == 73


class TestFiniteDifferences:
    def test_weights(self):
        offsets, w = fd_weights(1, 2)
        assert offsets == [-1, 0, 1] and w == [Fraction(-1, 2), 0, Fraction(1, 2)]
        assert sum(fd_weights(5, 4)[1]) == 0
        with pytest.raises(ValueError):
            fd_weights(1, 3)

    @pytest.mark.parametrize("text,deriv,acc", [
        ("1/(x + 3)", 1, 2), ("1/(x + 3)", 1, 4), ("x^5/(x^2 + 1)", 2, 4), ("1/(2 + x^2)", 3, 2),
    ])
    def test_convergence_rate(self, text, deriv, acc):
        rf = to_rational(text)
        exact = rf
        for _ in range(deriv):
            exact = exact.diff(X)
        f = lambda x: rf.evaluate({"x": x})
        pts = np.linspace(-0.5, 0.5, 7)
        target = exact.evaluate({"x": pts})
        errs = [np.max(np.abs(fd_derivative(f, pts, deriv, h, acc) - target)) for h in (0.1, 0.05)]
        rate = math.log2(errs[0] / errs[1])
        assert abs(rate - acc) < 0.5


class TestJacobi:
    def test_identities(self):
        for k in (0.1, 0.5, 0.9, 0.99):
            assert jacobi_sn(0.0, k) == 0
            assert jacobi_sn(ellipk(k), k) == pytest.approx(1, abs=1e-10)
        z = np.linspace(-7, 7, 57)
        assert np.allclose(jacobi_sn(z, 0), np.sin(z), atol=1e-15)

    @pytest.mark.parametrize("k", [0.0, 1e-5, 0.3, 0.7, 0.95, 0.999])
    def test_against_scipy(self, k):
        z = np.linspace(-12, 12, 401)
        sn, cn, dn = jacobi_sncndn(z, k)
        ref = scipy.special.ellipj(z, k * k)
        for ours, theirs in zip((sn, cn, dn), ref[:3]):
            assert np.max(np.abs(ours - theirs)) < 1e-12
        assert ellipk(k) == pytest.approx(scipy.special.ellipk(k * k), rel=1e-14)

    @settings(max_examples=50, deadline=None)
    @given(st.floats(-20, 20), st.floats(0, 0.98))
    def test_pythagorean_and_derivative(self, z, k):
        sn, cn, dn = (float(v) for v in jacobi_sncndn(z, k))
        assert sn * sn + cn * cn == pytest.approx(1, abs=1e-10)
        assert dn * dn + k * k * sn * sn == pytest.approx(1, abs=1e-10)
        dsn = float(fd_derivative(lambda w: jacobi_sn(w, k), np.asarray(z), 1, 1e-3, 8))
        assert dsn / dn == pytest.approx(cn, abs=1e-9)

    @pytest.mark.parametrize("k", [-0.1, 1.0, 2.0])
    def test_modulus_range(self, k):
        with pytest.raises(ValueError):
            jacobi_sn(0.3, k)


class TestODEResiduals:
    def test_constant_profile(self, tube):
        ode = reduce_pde(tube, invariants(VectorField.from_strings("0", "1")))
        rep = residual_ode(ode, "5", (0, 1), 50, PARAMS)
        assert rep.max_abs == 0 and rep.symbolic_zero

    def test_galilean_profile(self, tube):
        ode = reduce_pde(tube, invariants(VectorField.from_strings("t", "0", "1/a")))
        rep = residual_ode(ode, lambda chi: 3.0 / chi, (1, 2), 100, PARAMS)
        assert rep.max_abs < 1e-10
        assert residual_ode(ode, "c1/chi", (1, 2), 100, PARAMS).symbolic_zero

    def test_elliptic_screening(self, tube):
        ode = reduce_pde(tube, invariants(VectorField.from_strings("c0", "1")))
        profile = sn_ansatz(0.5, 1.0, 0.3, 1.2, 0.6)
        rep = residual_ode(ode, profile, (0, 3), 200, {**PARAMS, "a": 1, "c0": 1})
        assert np.isfinite(rep.max_abs) and rep.max_abs > 1e-3

    def test_step_underflow(self, tube):
        ode = reduce_pde(tube, invariants(VectorField.from_strings("0", "1")))
        with pytest.raises(FloatingPointError):
            residual_ode(ode, np.sin, (0, 1), 10, PARAMS, step=1e-300)
