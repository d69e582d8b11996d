# Invariant reductions, and the one closed-form solution they give.
#
# Run with:  python demos/02_reductions.py

import numpy as np

from liesym.determine import EvolutionPDE
from liesym.parser import parse
from liesym.presets import PRESETS
from liesym.prolong import VectorField
from liesym.reduce import invariants, reduce_pde, solve_linear_first_order
from liesym.verify import Grid, is_exact_solution, residual_numeric, residual_symbolic, transform_solution

pde = EvolutionPDE.from_expr(PRESETS["viscoelastic-tube"])

generators = {
    "v1 (space shift)": VectorField.from_strings("1", "0", "0"),
    "v2 (time shift)": VectorField.from_strings("0", "1", "0"),
    "v3 (Galilean boost)": VectorField.from_strings("t", "0", "1/a"),
    "v3 + beta*v2": VectorField.from_strings("t", "beta", "1/a"),
    "v2 + c0*v1": VectorField.from_strings("c0", "1", "0"),
}

for label, v in generators.items():
    inv = invariants(v)
    ode = reduce_pde(pde, inv)
    print(f"{label}")
    print(f"   chi = {inv.chi},  zeta = {inv.zeta}")
    print(f"   {ode}")
    for note in ode.notes:
        print("   note:", note)

# The boost reduces to a linear first-order ODE, solved by separation.
ode = reduce_pde(pde, invariants(generators["v3 (Galilean boost)"]))
sol = solve_linear_first_order(ode)
print("\nzeta(chi) =", sol.zeta)
print("u(x, t)   =", sol.u)

# Plugging it back in: the residual is zero as a rational function...
print("symbolic residual:", residual_symbolic(sol.u, pde))

# ...and tiny on a grid in floating point.
params = dict(a=2, b=3, c=5, d=7, e=11, c1=1)
report = residual_numeric(sol.u, pde, Grid(0, 1, 1, 2, 100, 100), params)
print(f"max |residual| on [0,1]x[1,2]: {report.max_abs:.3e}")

# Transforming by the one-parameter groups gives new solutions.
for g in ("G1", "G2", "G3"):
    moved = transform_solution(g, parse("s"), sol.u)
    print(f"{g}(s) u = {moved}    still a solution: {is_exact_solution(moved, pde)}")

# A look at the profile itself
x = np.linspace(0, 1, 5)
for t in (1.0, 1.5, 2.0):
    print(f"t = {t}:", np.round((x + params['a'] * params['c1']) / (params['a'] * t), 4))
