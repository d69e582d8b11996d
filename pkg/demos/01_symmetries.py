# Point symmetries of the viscoelastic-tube equation, from scratch.
#
#   u_t + a u u_x + b u_xxx + c u_xxxx + d u_xxxxx = e u_xx
#
# Run with:  python demos/01_symmetries.py

from liesym.algebra import adjoint, series_flags, structure_constants
from liesym.determine import EvolutionPDE, solve_symmetries
from liesym.optimal import normalize_1d, sample_vectors
from liesym.presets import PRESETS

pde = EvolutionPDE.from_expr(PRESETS["viscoelastic-tube"])
print("equation:", pde)
print("parameters:", pde.parameters)

# The infinitesimals are searched as polynomials of total degree 3 in (x, t, u).
# The linear determining system is solved at two parameter points and the
# coefficients are fitted back to monomials in a..e.
basis = solve_symmetries(pde, degree=3)
print("\nsymmetry algebra, dim", basis.dimension)
for i, v in enumerate(basis.fields, 1):
    print(f"  v{i} = {v}")

xi, eta, phi = basis.general_element()
print("\ngeneral element:  xi =", xi, "  eta =", eta, "  phi =", phi)

# Brackets
L = structure_constants(basis.fields)
print("\ncommutators [v_i, v_j]:")
for row in L.commutator_rows():
    print("  ", "  ".join(f"{c:>4}" for c in row))

flags = series_flags(L)
print("solvable:", flags.solvable, " nilpotent:", flags.nilpotent,
      " derived dims:", flags.derived_dims)

print("\nAd(exp(eps v3)) acting on v1, v2, v3:")
M = adjoint(L, 2, "eps").matrix()
for j, name in enumerate(("v1", "v2", "v3")):
    image = " + ".join(f"({M[i][j]})*v{i + 1}" for i in range(3) if not M[i][j].is_zero())
    print(f"   {name} -> {image}")

# Every element a1 v1 + a2 v2 + a3 v3 is conjugate to one of the canonical forms.
print("\nnormalizing a few random elements:")
for v in sample_vectors(6, seed=7):
    rep, witness = normalize_1d(L, v)
    print(f"  {[str(c) for c in v]!s:40} -> {[str(c) for c in rep]}")
