"""Lie algebra structure of a list of generators.

Everything is exact: structure constants are rationals obtained by solving
for each commutator in the basis, and adjoint matrices come from a
terminating Lie series.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .expr import Poly, param
from .linalg import identity, in_span, is_zero_matrix, matmul, matvec, rank, span_basis
from .prolong import VectorField

MAX_SERIES_ORDER = 10


class NonClosure(ValueError):
    """A commutator falls outside the span of the basis."""


class NonTerminating(ValueError):
    pass


def commutator(v: VectorField, w: VectorField) -> VectorField:
    """Lie bracket ``[v, w]``."""
    return VectorField(*(v(b) - w(a) for a, b in zip(v.components, w.components)))


def _flatten(fields: Sequence[VectorField]) -> tuple[list, list]:
    keys = sorted({(c, m) for f in fields for c, comp in enumerate(f.components) for m in comp.terms},
                  key=lambda cm: (cm[0], tuple((v.key, e) for v, e in cm[1])))
    vecs = [[f.components[c].terms.get(m, Fraction(0)) for c, m in keys] for f in fields]
    return keys, vecs


def express(basis: Sequence[VectorField], w: VectorField) -> list[Fraction] | None:
    """Rational coefficients of ``w`` in ``basis``, or None when outside the span."""
    keys, vecs = _flatten(list(basis) + [w])
    return in_span(vecs[:-1], vecs[-1])


@dataclass
class LieAlgebra:
    basis: list
    structure: list  # structure[i][j][k] = c^k_ij with [v_i, v_j] = sum_k c^k_ij v_k
    names: list = field(default_factory=list)

    def __post_init__(self):
        if not self.names:
            self.names = [f"v{k + 1}" for k in range(self.dim)]

    @property
    def dim(self) -> int:
        return len(self.structure)

    @classmethod
    def from_structure(cls, structure, names=None) -> "LieAlgebra":
        """Abstract algebra given only by its structure constants."""
        s = [[[Fraction(c) for c in row] for row in plane] for plane in structure]
        return cls(basis=[], structure=s, names=list(names or []))

    def bracket(self, a: Sequence, b: Sequence) -> list[Fraction]:
        n = self.dim
        out = [Fraction(0)] * n
        for i in range(n):
            if a[i] == 0:
                continue
            for j in range(n):
                if b[j] == 0:
                    continue
                f = a[i] * b[j]
                for k, c in enumerate(self.structure[i][j]):
                    if c:
                        out[k] += f * c
        return out

    def ad(self, i: int) -> list[list[Fraction]]:
        """Matrix of ``ad v_i`` acting on coefficient columns."""
        n = self.dim
        return [[self.structure[i][j][k] for j in range(n)] for k in range(n)]

    def unit(self, i: int) -> list[Fraction]:
        return [Fraction(int(k == i)) for k in range(self.dim)]

    def combination(self, coeffs: Sequence) -> VectorField:
        out = VectorField()
        for c, f in zip(coeffs, self.basis):
            if c:
                out = out + f.scale(Fraction(c))
        return out

    def format_vector(self, coeffs: Sequence) -> str:
        return format_combination(coeffs, self.names)

    def commutator_rows(self) -> list[list[str]]:
        return [[self.format_vector(self.structure[i][j]) for j in range(self.dim)] for i in range(self.dim)]

    def to_dict(self) -> dict:
        return {
            "names": self.names,
            "commutators": self.commutator_rows(),
            "structure": [[[str(c) for c in row] for row in plane] for plane in self.structure],
        }


def format_combination(coeffs: Sequence, names: Sequence[str]) -> str:
    """``v3 - eps*v1`` style text, highest index first; entries may be Fractions or Polys."""
    out = ""
    for c, name in reversed(list(zip(coeffs, names))):
        p = c if isinstance(c, Poly) else Poly.const(c)
        if p.is_zero():
            continue
        sign = "+"
        if all(v < 0 for v in p.terms.values()):
            sign, p = "-", -p
        if p == Poly.const(1):
            term = name
        else:
            text = str(p)
            term = f"({text})*{name}" if len(p) > 1 else f"{text}*{name}"
        if out:
            out += f" {sign} {term}"
        else:
            out = term if sign == "+" else f"-{term}"
    return out or "0"


def structure_constants(basis: Sequence[VectorField]) -> LieAlgebra:
    """Exact structure constants; raises NonClosure if the span is not a Lie algebra."""
    basis = list(basis)
    n = len(basis)
    keys, vecs = _flatten(basis)
    if n and (not keys or rank(vecs, len(keys)) < n):
        raise ValueError("basis vectors are linearly dependent")
    structure = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            w = commutator(basis[i], basis[j])
            coeffs = express(basis, w)
            if coeffs is None:
                raise NonClosure(f"[v{i + 1}, v{j + 1}] = {w} is not in the span of the basis")
            structure[i][j] = coeffs
            structure[j][i] = [-c for c in coeffs]
    return LieAlgebra(basis, structure)


def check_antisymmetry(L: LieAlgebra) -> bool:
    n = L.dim
    return all(L.structure[i][j][k] == -L.structure[j][i][k] for i in range(n) for j in range(n) for k in range(n))


def check_jacobi(L: LieAlgebra) -> bool:
    n = L.dim
    c = L.structure
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for l in range(n):
                    s = sum(c[i][j][m] * c[m][k][l] + c[j][k][m] * c[m][i][l] + c[k][i][m] * c[m][j][l]
                            for m in range(n))
                    if s != 0:
                        return False
    return True


# ---------------------------------------------------------------------------
# series


def bracket_spaces(L: LieAlgebra, A: Sequence, B: Sequence) -> list[list[Fraction]]:
    return span_basis([L.bracket(a, b) for a in A for b in B], L.dim)


@dataclass
class SeriesFlags:
    solvable: bool
    nilpotent: bool
    derived_length: int | None
    nilpotency_class: int | None
    derived_dims: list
    lower_central_dims: list
    derived_series: list
    lower_central_series: list

    def to_dict(self) -> dict:
        return {
            "solvable": self.solvable,
            "nilpotent": self.nilpotent,
            "derived_length": self.derived_length,
            "nilpotency_class": self.nilpotency_class,
            "derived_dims": self.derived_dims,
            "lower_central_dims": self.lower_central_dims,
        }


def _series(L: LieAlgebra, lower: bool) -> list:
    full = [L.unit(i) for i in range(L.dim)]
    current = span_basis(full, L.dim)
    out = [current]
    while current:
        nxt = bracket_spaces(L, full if lower else current, current)
        if len(nxt) == len(current):
            break
        out.append(nxt)
        current = nxt
    return out


def series_flags(L: LieAlgebra) -> SeriesFlags:
    derived = _series(L, lower=False)
    lower = _series(L, lower=True)
    solvable = not derived[-1]
    nilpotent = not lower[-1]
    return SeriesFlags(
        solvable=solvable,
        nilpotent=nilpotent,
        derived_length=len(derived) - 1 if solvable else None,
        nilpotency_class=len(lower) - 1 if nilpotent else None,
        derived_dims=[len(s) for s in derived],
        lower_central_dims=[len(s) for s in lower],
        derived_series=derived,
        lower_central_series=lower,
    )


# ---------------------------------------------------------------------------
# adjoint representation


@dataclass
class AdjointMatrix:
    """``Ad(exp(eps v_i))`` as the polynomial ``sum_n eps^n terms[n]``.

    Columns act on coefficient vectors: ``Ad(exp(eps v_i)) v_j = sum_k M[k][j] v_k``.
    """

    index: int
    eps: object  # parameter name (symbolic) or Fraction
    terms: list

    @property
    def dim(self) -> int:
        return len(self.terms[0])

    def at(self, value) -> list[list[Fraction]]:
        value = Fraction(value)
        n = self.dim
        out = [[Fraction(0)] * n for _ in range(n)]
        for p, t in enumerate(self.terms):
            f = value ** p
            for r in range(n):
                for c in range(n):
                    if t[r][c]:
                        out[r][c] += f * t[r][c]
        return out

    def matrix(self) -> list:
        """Entries as Polys in the parameter symbol, or Fractions if ``eps`` is a number."""
        if not isinstance(self.eps, str):
            return self.at(self.eps)
        e = Poly.var(param(self.eps))
        n = self.dim
        out = [[Poly() for _ in range(n)] for _ in range(n)]
        for p, t in enumerate(self.terms):
            ep = e ** p
            for r in range(n):
                for c in range(n):
                    if t[r][c]:
                        out[r][c] = out[r][c] + ep.scale(t[r][c])
        return out

    def apply(self, vec: Sequence, value=None) -> list[Fraction]:
        value = self.eps if value is None else value
        return matvec(self.at(value), vec)


def adjoint(L: LieAlgebra, i: int, eps="eps", truncation: int | None = None) -> AdjointMatrix:
    """Lie series ``v_j - eps[v_i, v_j] + eps^2/2 [v_i, [v_i, v_j]] - ...``."""
    A = L.ad(i)
    n = L.dim
    terms = [identity(n)]
    power = identity(n)
    limit = truncation if truncation is not None else MAX_SERIES_ORDER
    p = 0
    while True:
        power = matmul(A, power)
        p += 1
        if is_zero_matrix(power):
            break
        if p > limit:
            if truncation is None:
                raise NonTerminating(f"ad v{i + 1} is not nilpotent up to order {MAX_SERIES_ORDER}")
            break
        f = Fraction((-1) ** p, math.factorial(p))
        terms.append([[f * x for x in row] for row in power])
    if not isinstance(eps, str):
        eps = Fraction(eps)
    return AdjointMatrix(i, eps, terms)


def adjoint_rows(L: LieAlgebra, eps: str = "eps", truncation: int | None = None) -> list[list[str]]:
    """Rows ``Ad(exp(eps v_i)) v_j`` rendered as combinations of the basis."""
    rows = []
    for i in range(L.dim):
        M = adjoint(L, i, eps, truncation).matrix()
        rows.append([format_combination([M[k][j] for k in range(L.dim)], L.names) for j in range(L.dim)])
    return rows


def is_automorphism(L: LieAlgebra, M: Sequence[Sequence]) -> bool:
    """``M [a, b] == [M a, M b]`` on all basis pairs."""
    n = L.dim
    for i in range(n):
        for j in range(n):
            lhs = matvec(M, L.bracket(L.unit(i), L.unit(j)))
            rhs = L.bracket(matvec(M, L.unit(i)), matvec(M, L.unit(j)))
            if lhs != rhs:
                return False
    return True


def is_subalgebra(L: LieAlgebra, vectors: Sequence[Sequence]) -> bool:
    """True iff the span of ``vectors`` is closed under the bracket."""
    vs = [[Fraction(c) for c in v] for v in vectors]
    if rank(vs, L.dim) != len(vs):
        raise ValueError("vectors must be linearly independent")
    for a in range(len(vs)):
        for b in range(a + 1, len(vs)):
            if in_span(vs, L.bracket(vs[a], vs[b])) is None:
                return False
    return True


def parse_combination(text: str, names: Sequence[str]) -> list[Poly]:
    """Coefficients of ``"v3 + beta*v2"`` over ``names``; coefficients may hold parameters."""
    from .expr import X, T, U, expand
    from .parser import parse

    p = expand(parse(text, params=names))
    syms = {s.name: s for s in p.variables() if getattr(s, "name", None) in names}
    parts = p.collect([syms[n] for n in names if n in syms])
    out = [Poly() for _ in names]
    for mono, coeff in parts.items():
        if len(mono) != 1 or mono[0][1] != 1:
            raise ValueError(f"{text!r} is not linear in {', '.join(names)}")
        if coeff.variables() & {X, T, U}:
            raise ValueError(f"coefficient {coeff} depends on the coordinates")
        out[list(names).index(mono[0][0].name)] = coeff
    if all(c.is_zero() for c in out):
        raise ValueError(f"{text!r} is the zero combination")
    return out


def same_span(A: Sequence[VectorField], B: Sequence[VectorField], point: dict) -> bool:
    """Span equality after substituting numeric parameter values."""
    from .expr import param

    subs = {param(k): Poly.const(v) for k, v in point.items()}
    a = [f.subs(subs) for f in A]
    b = [f.subs(subs) for f in B]
    _, vecs = _flatten(a + b)
    ncols = len(vecs[0]) if vecs else 0
    ra = rank(vecs[:len(a)], ncols)
    return ra == rank(vecs[len(a):], ncols) == rank(vecs, ncols)
