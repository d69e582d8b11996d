"""Determining equations for Lie point symmetries of evolution equations.

The infinitesimals are sought as polynomials of bounded degree in (x, t, u).
Because the invariance condition is linear in the infinitesimals, every
ansatz monomial contributes one column of the determining matrix: apply the
prolonged single-monomial field to the equation, eliminate u_t and its
derivatives, and read off the coefficient of every jet monomial.

Parameters of the equation are instantiated at two generic rational points
before the nullspace is computed; the parameter dependence of the generators
is then recovered monomial by monomial from the two solutions.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .expr import (
    DEFAULT_MAX_ORDER, T, U, X, ExprError, JetVar, OrderOverflow, Poly,
    Symbol, expand, param,
)
from .linalg import nullspace
from .parser import parse
from .prolong import VectorField, apply_prolonged

log = logging.getLogger(__name__)

PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71)
DEFAULT_DEGREE = 3
FIT_EXPONENT_BOUND = 3


class SymmetryError(RuntimeError):
    pass


class NullspaceMismatch(SymmetryError):
    """The two parameter points produced structurally different solution spaces."""


class VerificationFailure(SymmetryError):
    pass


def _ut() -> JetVar:
    return JetVar("u", 0, 1)


@dataclass
class EvolutionPDE:
    """``u_t = F(x, t, u, u_x, ..., u_{x^n})`` written as ``lhs = 0``."""

    lhs: Poly
    solved_form: Poly
    order: int
    params: dict = field(default_factory=dict)  # name -> Fraction, empty when symbolic
    name: str = ""
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    @classmethod
    def from_expr(cls, e, name: str = "", extra_params: Sequence[str] = ()) -> "EvolutionPDE":
        if isinstance(e, str):
            e = parse(e, params=extra_params)
        lhs = expand(e)
        ut = _ut()
        pieces = lhs.collect([ut])
        if set(pieces) - {(), ((ut, 1),)}:
            raise ExprError("equation must be linear in u_t")
        coeff = pieces.get(((ut, 1),), Poly())
        if coeff.is_zero() or not coeff.is_monomial() or any(
            not (isinstance(v, Symbol) and v.kind == "parameter") for v in coeff.variables()
        ):
            raise ExprError("coefficient of u_t must be a nonzero constant")
        lhs = lhs * coeff.inverse()
        rest = lhs - Poly.var(ut)
        for v in rest.variables():
            if isinstance(v, JetVar) and v.j:
                raise ExprError(f"{v.name}: only u_t may carry a t-derivative")
        order = max((v.order for v in lhs.variables() if isinstance(v, JetVar)), default=1)
        return cls(lhs=lhs, solved_form=-rest, order=order, name=name)

    @property
    def parameters(self) -> list[str]:
        return sorted(v.name for v in self.lhs.variables() if isinstance(v, Symbol) and v.kind == "parameter")

    def instantiate(self, point: Mapping[str, object]) -> "EvolutionPDE":
        values = {k: Fraction(v) for k, v in point.items()}
        missing = set(self.parameters) - set(values)
        if missing:
            raise ExprError(f"no value for parameters {sorted(missing)}")
        mapping = {param(k): Poly.const(v) for k, v in values.items()}
        return EvolutionPDE(
            lhs=self.lhs.subs(mapping),
            solved_form=self.solved_form.subs(mapping),
            order=self.order,
            params={k: values[k] for k in self.parameters},
            name=self.name,
        )

    def __str__(self):
        return f"{self.lhs} = 0"


def reduce_mod_equation(e, pde: EvolutionPDE, max_order: int = DEFAULT_MAX_ORDER) -> Poly:
    """Eliminate every t-derivative of u using the solved form and its total derivatives."""
    p = e if isinstance(e, Poly) else expand(e)
    tjets = [v for v in p.variables() if isinstance(v, JetVar) and v.dep == "u" and v.j]
    if not tjets:
        return p
    mapping = {v: _replacement(pde, v.i, v.j, max_order) for v in tjets}
    return p.subs(mapping)


def _replacement(pde: EvolutionPDE, i: int, j: int, max_order: int) -> Poly:
    """Value of ``u_{x^i t^j}`` on the solution manifold, free of t-derivatives."""
    key = (i, j, max_order)
    cache = pde._cache
    if key in cache:
        return cache[key]
    if j == 1:
        if i == 0:
            out = pde.solved_form
        else:
            out = _replacement(pde, i - 1, 1, max_order).total_derivative(X, max_order)
        if i + pde.order > max_order:
            raise OrderOverflow(f"eliminating u_x{i}t needs jet order {i + pde.order} > {max_order}")
    else:
        prev = _replacement(pde, i, j - 1, max_order)
        out = reduce_mod_equation(prev.total_derivative(T, max_order), pde, max_order)
    cache[key] = out
    return out


# ---------------------------------------------------------------------------
# ansatz and determining matrix


def _monomials(degree: int) -> list[tuple[int, int, int]]:
    out = []
    for total in range(degree + 1):
        for i in range(total, -1, -1):
            for j in range(total - i, -1, -1):
                out.append((i, j, total - i - j))
    return out


@dataclass(frozen=True)
class Ansatz:
    degree: int

    @property
    def monomials(self) -> list[tuple[int, int, int]]:
        return _monomials(self.degree)

    @property
    def columns(self) -> list[tuple[str, tuple[int, int, int]]]:
        ms = self.monomials
        return [(comp, m) for comp in ("xi", "eta", "phi") for m in ms]

    @property
    def labels(self) -> list[str]:
        return [f"{comp}[{_mono_text(m)}]" for comp, m in self.columns]

    def __len__(self):
        return 3 * math.comb(self.degree + 3, 3)

    def column_field(self, k: int) -> VectorField:
        comp, m = self.columns[k]
        mono = _mono_poly(m)
        return VectorField(**{comp: mono})

    def field_from(self, coeffs: Sequence) -> VectorField:
        """Vector field with the given coefficient (number or Poly) per column."""
        comps = {"xi": Poly(), "eta": Poly(), "phi": Poly()}
        for (comp, m), c in zip(self.columns, coeffs):
            if isinstance(c, Poly):
                if c:
                    comps[comp] = comps[comp] + c * _mono_poly(m)
            elif c:
                comps[comp] = comps[comp] + _mono_poly(m).scale(c)
        return VectorField(**comps)


def _mono_poly(m: tuple[int, int, int]) -> Poly:
    i, j, k = m
    out = Poly.const(1)
    for v, n in ((X, i), (T, j), (U, k)):
        if n:
            out = out * Poly.var(v, n)
    return out


def _mono_text(m) -> str:
    return str(_mono_poly(m))


@dataclass
class LinearSystem:
    matrix: list  # rows of Fractions
    column_labels: list
    row_labels: list

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.matrix), len(self.column_labels))

    def nullspace(self):
        return nullspace(self.matrix, len(self.column_labels))


def invariance_condition(v: VectorField, pde: EvolutionPDE, max_order: int | None = None) -> Poly:
    """``Pr v[lhs]`` restricted to solutions, expanded.  Zero iff ``v`` is a symmetry."""
    if max_order is None:
        max_order = 3 * pde.order
    pr = apply_prolonged(v, pde.order, pde.lhs, max_order=max_order)
    return reduce_mod_equation(pr, pde, max_order)


def determining_system(pde: EvolutionPDE, ansatz: Ansatz, max_order: int | None = None) -> LinearSystem:
    """One homogeneous linear equation per surviving monomial in x, t, u and jets."""
    if pde.parameters:
        raise ExprError(f"instantiate parameters {pde.parameters} first")
    columns = []
    for k in range(len(ansatz)):
        columns.append(invariance_condition(ansatz.column_field(k), pde, max_order).terms)
    row_keys = sorted({m for col in columns for m in col}, key=lambda m: tuple((v.key, e) for v, e in m))
    rows = []
    labels = []
    seen = set()
    for m in row_keys:
        row = [col.get(m, Fraction(0)) for col in columns]
        lead = next(c for c in row if c != 0)
        canon = tuple(c / lead for c in row)
        if canon in seen:
            continue
        seen.add(canon)
        rows.append(list(canon))
        labels.append(str(Poly({m: 1})))
    if not rows:
        rows = [[Fraction(0)] * len(ansatz)]
        labels = ["0"]
    return LinearSystem(rows, ansatz.labels, labels)


# ---------------------------------------------------------------------------
# solving


def default_points(names: Sequence[str]) -> tuple[dict, dict]:
    n = len(names)
    if 2 * n > len(PRIMES):
        raise ValueError("too many parameters for the default points")
    first = {k: Fraction(p) for k, p in zip(names, PRIMES[:n])}
    second = {k: Fraction(p) for k, p in zip(names, PRIMES[5:5 + n] if n <= 5 else PRIMES[n:2 * n])}
    return first, second


def _integer_normalize(v: Sequence[Fraction]) -> list[Fraction]:
    nz = [c for c in v if c != 0]
    if not nz:
        return list(v)
    den = math.lcm(*(c.denominator for c in nz))
    ints = [c * den for c in v]
    g = math.gcd(*(int(c) for c in ints if c != 0))
    sign = 1 if next(c for c in ints if c != 0) > 0 else -1
    return [c * sign / g for c in ints]


def fit_parameter_monomial(v1: Fraction, v2: Fraction, names: Sequence[str],
                           p1: Mapping[str, Fraction], p2: Mapping[str, Fraction],
                           bound: int = FIT_EXPONENT_BOUND) -> Poly:
    """Find ``k * prod(name**e)`` taking value v1 at p1 and v2 at p2."""
    v1, v2 = Fraction(v1), Fraction(v2)
    if v1 == 0 and v2 == 0:
        return Poly()
    if v1 == 0 or v2 == 0:
        raise NullspaceMismatch(f"coefficient vanishes at only one point ({v1} vs {v2})")
    target = v1 / v2
    ratios = [Fraction(p1[n]) / Fraction(p2[n]) for n in names]
    candidates = sorted(itertools.product(range(-bound, bound + 1), repeat=len(names)),
                        key=lambda e: (sum(map(abs, e)), [abs(x) for x in e], [-x for x in e]))
    for exps in candidates:
        val = Fraction(1)
        for r, e in zip(ratios, exps):
            if e:
                val *= r ** e
        if val == target:
            scale = Fraction(1)
            mono = Poly.const(1)
            for n, e in zip(names, exps):
                if e:
                    scale *= Fraction(p1[n]) ** e
                    mono = mono * Poly.var(param(n), e)
            return mono.scale(v1 / scale)
    raise NullspaceMismatch(f"coefficient pair ({v1}, {v2}) is not a parameter monomial")


@dataclass
class SymmetryBasis:
    fields: list            # canonical generators
    raw_fields: list        # integer-normalized generators before the final rescaling
    points: tuple           # the two parameter instantiations
    dimension: int
    free_columns: list
    ansatz: Ansatz
    pde: EvolutionPDE

    def general_element(self) -> tuple[Poly, Poly, Poly]:
        """Infinitesimals with one free constant ``c_k`` per generator."""
        total = VectorField()
        for k, f in enumerate(self.raw_fields, start=1):
            total = total + f.scale(Poly.var(param(f"c{k}")))
        return total.components

    def to_dict(self) -> dict:
        return {
            "pde": str(self.pde),
            "degree": self.ansatz.degree,
            "dimension": self.dimension,
            "points": [{k: str(v) for k, v in p.items()} for p in self.points],
            "generators": [dict(name=f"v{k}", **f.to_dict()) for k, f in enumerate(self.fields, start=1)],
        }


def solve_symmetries(pde: EvolutionPDE, degree: int = DEFAULT_DEGREE,
                     points: tuple[Mapping, Mapping] | None = None) -> SymmetryBasis:
    """Polynomial Lie point symmetries of ``pde`` up to the given degree."""
    if degree < 1:
        raise ValueError("ansatz degree must be >= 1")
    names = pde.parameters
    if points is None:
        points = default_points(names)
    p1 = {k: Fraction(v) for k, v in points[0].items()}
    p2 = {k: Fraction(v) for k, v in points[1].items()}
    for p in (p1, p2):
        if any(p.get(n, 0) == 0 for n in names):
            raise ValueError("parameter points must assign a nonzero value to every parameter")
    if names and all(p1[n] == p2[n] for n in names):
        raise ValueError("parameter points must be distinct")

    ansatz = Ansatz(degree)
    spaces = []
    for p in (p1, p2):
        system = determining_system(pde.instantiate(p), ansatz)
        basis, free = system.nullspace()
        log.info("degree %d at %s: %d x %d system, nullspace %d", degree, p, *system.shape, len(basis))
        spaces.append((basis, free))
    (b1, f1), (b2, f2) = spaces
    if f1 != f2:
        raise NullspaceMismatch(
            f"free columns differ between points: {[ansatz.labels[c] for c in f1]} vs {[ansatz.labels[c] for c in f2]}"
        )

    raw, canon = [], []
    for v1, v2 in zip(b1, b2):
        n1, n2 = _integer_normalize(v1), _integer_normalize(v2)
        coeffs = [fit_parameter_monomial(a, b, names, p1, p2) for a, b in zip(n1, n2)]
        raw_field = ansatz.field_from(coeffs)
        lead = next(c for c in coeffs if c)
        (mono, c), = lead.terms.items()
        unit = Poly({mono: Fraction(1)}) if c > 0 else Poly({mono: Fraction(-1)})
        raw.append(raw_field)
        canon.append(raw_field.scale(unit.inverse()))

    for g in canon:
        residual = invariance_condition(g, pde)
        if residual:
            raise VerificationFailure(f"generator {g} fails the invariance condition: {residual}")
    return SymmetryBasis(canon, raw, (p1, p2), len(canon), f1, ansatz, pde)
