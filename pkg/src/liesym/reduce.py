"""Symmetry reductions of an evolution equation to an ODE.

Supported generators are ``xi(t)*d_x + eta*d_t + phi*d_u`` with ``xi`` affine
in t and ``eta``, ``phi`` constant.  Their characteristic systems integrate in
closed form, giving invariants of one of two shapes:

* ``eta != 0``: ``chi = x - h(t)``, ``zeta = u - (phi/eta)*t``
* ``eta == 0``: ``chi = t``, ``zeta = u - (phi/xi)*x``

Substituting ``u = zeta(chi) + g(x, t)`` into the equation through the chain
rule must leave an expression in ``chi`` and the ``zeta`` jets only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .determine import EvolutionPDE
from .expr import (
    CHI, T, U, X, ZETA, Expr, ExprError, JetVar, Poly, Symbol, add,
    substitute, to_str,
)
from .prolong import VectorField

ZETA_MAX_ORDER = 64


class UnsupportedGenerator(ExprError):
    pass


class ReductionError(ExprError):
    """Explicit x or t survived the change of variables."""


class UnsupportedODE(ExprError):
    pass


@dataclass(frozen=True)
class Invariants:
    chi: Poly
    zeta: Poly
    generator: VectorField
    kind: str        # "t": chi = t;  "x": chi = x - shift(t)
    shift: Poly      # h(t) when kind == "x"

    @property
    def offset(self) -> Poly:
        """``g(x, t)`` with ``u = zeta + g``."""
        return Poly.var(U) - self.zeta

    def singular_loci(self) -> list[str]:
        return _singular(self.chi, self.zeta)

    def to_dict(self) -> dict:
        return {"chi": str(self.chi), "zeta": str(self.zeta), "generator": str(self.generator)}


def _singular(*polys: Poly) -> list[str]:
    names = set()
    for p in polys:
        for m in p.terms:
            for v, e in m:
                if e < 0:
                    names.add(v)
    return [f"{v.name} = 0" for v in sorted(names, key=lambda v: v.key)]


def _is_param_monomial(p: Poly) -> bool:
    return p.is_monomial() and all(isinstance(v, Symbol) and v.kind == "parameter" for v in p.variables())


def _free_of(p: Poly, *vs) -> bool:
    return not (p.variables() & set(vs))


def invariants(v: VectorField) -> Invariants:
    """Two functionally independent invariants of ``v``."""
    xi, eta, phi = v.components
    if v.is_zero():
        raise UnsupportedGenerator("generator acts trivially")
    if not (_free_of(eta, X, T, U) and _free_of(phi, X, T, U)):
        raise UnsupportedGenerator("eta and phi must be constant")
    if not _free_of(xi, X, U) or xi.degree(T) > 1 or any(e < 0 for m in xi.terms for w, e in m if w == T):
        raise UnsupportedGenerator("xi must be affine in t and independent of x and u")

    if eta:
        if not _is_param_monomial(eta):
            raise UnsupportedGenerator(f"cannot divide by eta = {eta}")
        inv_eta = eta.inverse()
        parts = xi.collect([T])
        p = parts.get((), Poly())
        q = parts.get(((T, 1),), Poly())
        t = Poly.var(T)
        shift = (p * t + q * t * t * Fraction(1, 2)) * inv_eta
        chi = Poly.var(X) - shift
        zeta = Poly.var(U) - phi * inv_eta * t
        out = Invariants(chi, zeta, v, "x", shift)
    elif xi:
        if not xi.is_monomial():
            raise UnsupportedGenerator(f"cannot divide by xi = {xi}")
        chi = Poly.var(T)
        zeta = Poly.var(U) - phi * xi.inverse() * Poly.var(X)
        out = Invariants(chi, zeta, v, "t", Poly())
    else:
        raise UnsupportedGenerator("generator only moves u; no invariant involves u")

    if v(out.chi) or v(out.zeta):
        raise AssertionError(f"invariants of {v} are not annihilated")
    return out


def jacobian_rank(inv: Invariants, point: dict) -> int:
    """Rank of d(chi, zeta)/d(x, t, u) at a rational point."""
    from .linalg import rank
    rows = [[p.diff(w).evaluate(point) for w in (X, T, U)] for p in (inv.chi, inv.zeta)]
    return rank(rows, 3)


@dataclass
class ReducedODE:
    expr: Poly
    invariants: Invariants
    singular: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def order(self) -> int:
        return max((v.order for v in self.expr.variables() if isinstance(v, JetVar)), default=-1)

    def normalized(self) -> Poly:
        """Scaled so that the first term in canonical order has coefficient 1."""
        if not self.expr:
            return self.expr
        _, c = self.expr.sorted_terms()[0]
        return self.expr.scale(1 / c)

    def __str__(self):
        return f"{self.expr} = 0"

    def to_dict(self) -> dict:
        return {
            "ode": str(self.expr),
            "invariants": self.invariants.to_dict(),
            "singular": self.singular,
            "notes": self.notes,
        }


def proportional(p: Poly, q: Poly) -> bool:
    """``p == lam*q`` for a nonzero constant or parameter monomial ``lam``."""
    if not p or not q:
        return not p and not q
    (m1, c1), (m2, c2) = p.sorted_terms()[0], q.sorted_terms()[0]
    lam = Poly({m1: c1}) * Poly({m2: c2}).inverse()
    if not all(isinstance(v, Symbol) and v.kind == "parameter" for v in lam.variables()):
        return False
    return p == q * lam


def _chain_derivative(p: Poly, direction: Symbol, chi: Poly) -> Poly:
    """Total derivative in x or t when ``zeta`` is a function of ``chi(x, t)``."""
    out = p.diff(direction)
    dchi = chi.diff(direction)
    for w in p.variables():
        if isinstance(w, JetVar) and w.dep == "zeta":
            out = out + p.diff(w) * Poly.var(w.shifted(1)) * dchi
    return out


def _u_jets(inv: Invariants, needed) -> dict:
    base = Poly.var(ZETA) + inv.offset
    out = {}
    for w in needed:
        p = base
        for _ in range(w.i):
            p = _chain_derivative(p, X, inv.chi)
        for _ in range(w.j):
            p = _chain_derivative(p, T, inv.chi)
        out[w] = p
    return out


def _to_invariant_coordinates(p: Poly, inv: Invariants) -> Poly:
    if inv.kind == "t":
        return p.subs({T: Poly.var(CHI)})
    return p.subs({X: Poly.var(CHI) + inv.shift})


def reduce_pde(pde: EvolutionPDE, inv: Invariants) -> ReducedODE:
    """Rewrite ``pde`` in the invariants of ``inv``; the result depends on chi and zeta only."""
    for c in (inv.chi, inv.zeta):
        if inv.generator(c):
            raise ReductionError("invariants are not annihilated by their generator")
    needed = [w for w in pde.lhs.variables() if isinstance(w, JetVar)]
    jets = _u_jets(inv, needed)

    total = Poly()
    explicit_parts: dict = {}
    for m, c in pde.lhs.terms.items():
        term = _to_invariant_coordinates(Poly({m: c}).subs(jets), inv)
        total = total + term
        for mm, cc in term.terms.items():
            if any(w in (X, T) for w, _ in mm):
                explicit_parts.setdefault(mm, []).append(cc)

    leftovers = Poly({m: c for m, c in total.terms.items() if any(w in (X, T) for w, _ in m)})
    if leftovers:
        raise ReductionError(f"explicit coordinates survive the reduction: {leftovers}")

    notes = []
    cancelled = [Poly({m: cs[0]}) for m, cs in sorted(explicit_parts.items(), key=lambda kv: str(kv[0]))
                 if len(cs) > 1]
    if cancelled:
        text = ", ".join(f"±({p})" for p in cancelled)
        notes.append(f"explicit-coordinate terms cancel between equation terms: {text}")
    singular = sorted(set(inv.singular_loci()) | set(_singular(total)))
    return ReducedODE(total, inv, singular, notes)


@dataclass
class FirstOrderSolution:
    zeta: Poly          # zeta as a function of chi, with constant c1
    u: Expr             # composed back to (x, t)

    def to_dict(self) -> dict:
        return {"zeta": str(self.zeta), "u": to_str(self.u)}


def solve_linear_first_order(ode: ReducedODE, constant: str = "c1") -> FirstOrderSolution:
    """Solve ``zeta_chi + k*chi^m*zeta = 0``; only ``m == -1`` (or ``k == 0``) is supported."""
    from .expr import param

    e = ode.expr
    zjets = {w for w in e.variables() if isinstance(w, JetVar)}
    z0, z1 = JetVar("zeta", 0), JetVar("zeta", 1)
    if not zjets <= {z0, z1} or z1 not in zjets:
        raise UnsupportedODE("not a first-order equation in zeta")
    parts = e.collect([z0, z1])
    if set(parts) - {((z0, 1),), ((z1, 1),)}:
        raise UnsupportedODE("equation is not linear homogeneous in zeta")
    lead = parts[((z1, 1),)]
    if not lead.is_monomial():
        raise UnsupportedODE(f"cannot divide by {lead}")
    p = parts.get(((z0, 1),), Poly()) * lead.inverse()
    c1 = Poly.var(param(constant))
    if not p:
        zeta = c1
    else:
        if not p.is_monomial():
            raise UnsupportedODE(f"coefficient {p} is not a monomial in chi")
        (m, k), = p.terms.items()
        powers = dict(m)
        if set(powers) - {CHI} or powers.get(CHI, 0) != -1:
            raise UnsupportedODE(f"coefficient {p} is not of the form k/chi")
        if k.denominator != 1:
            raise UnsupportedODE("non-integer exponent in the solution")
        zeta = c1 * Poly.var(CHI, -int(k)) if k else c1
    chi_expr = ode.invariants.chi.to_expr()
    u = add(substitute(zeta.to_expr(), CHI, chi_expr), ode.invariants.offset.to_expr())
    return FirstOrderSolution(zeta, u)
