"""Lie point symmetries, optimal systems and reductions of scalar evolution equations."""

from .algebra import (
    LieAlgebra, adjoint, adjoint_rows, check_jacobi, commutator, is_automorphism,
    is_subalgebra, parse_combination, series_flags, structure_constants,
)
from .determine import EvolutionPDE, solve_symmetries
from .expr import Poly, expand, to_str, total_derivative
from .optimal import Family, normalize_1d, verify_optimal_system
from .parser import parse
from .presets import PRESETS
from .prolong import VectorField, prolong
from .reduce import invariants, reduce_pde, solve_linear_first_order
from .verify import (
    Grid, jacobi_sn, residual_numeric, residual_ode, residual_symbolic, transform_solution,
)

__version__ = "0.1.0"

__all__ = [
    "EvolutionPDE", "Family", "Grid", "LieAlgebra", "PRESETS", "Poly", "VectorField",
    "adjoint", "adjoint_rows", "check_jacobi", "commutator", "expand", "invariants",
    "is_automorphism", "is_subalgebra", "jacobi_sn", "normalize_1d", "parse",
    "parse_combination", "prolong", "reduce_pde", "residual_numeric", "residual_ode",
    "residual_symbolic", "series_flags", "solve_linear_first_order", "solve_symmetries",
    "structure_constants", "to_str", "total_derivative", "transform_solution",
    "verify_optimal_system",
]
