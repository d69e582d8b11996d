"""Vector fields on (x, t, u) and their prolongations to jet space."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .expr import (
    DEFAULT_MAX_ORDER, T, U, X, ExprError, JetVar, OrderOverflow, Poly, Symbol,
    expand, to_str,
)


def _poly(obj) -> Poly:
    if isinstance(obj, Poly):
        return obj
    if isinstance(obj, (int, Fraction)):
        return Poly.const(obj)
    if isinstance(obj, str):
        from .parser import parse
        return expand(parse(obj))
    return expand(obj)


@dataclass(frozen=True)
class VectorField:
    """``xi*d_x + eta*d_t + phi*d_u`` with coefficients in x, t, u and parameters."""

    xi: Poly = field(default_factory=Poly)
    eta: Poly = field(default_factory=Poly)
    phi: Poly = field(default_factory=Poly)

    def __post_init__(self):
        for name in ("xi", "eta", "phi"):
            p = _poly(getattr(self, name))
            object.__setattr__(self, name, p)
            for v in p.variables():
                if isinstance(v, JetVar) and (v.dep != "u" or v.order):
                    raise ExprError(f"{name} may not depend on {v.name}")
                if isinstance(v, Symbol) and v.kind == "independent" and v.name not in ("x", "t"):
                    raise ExprError(f"{name} may not depend on {v.name}")

    @property
    def components(self) -> tuple[Poly, Poly, Poly]:
        return (self.xi, self.eta, self.phi)

    def __add__(self, other: "VectorField") -> "VectorField":
        return VectorField(self.xi + other.xi, self.eta + other.eta, self.phi + other.phi)

    def __sub__(self, other: "VectorField") -> "VectorField":
        return VectorField(self.xi - other.xi, self.eta - other.eta, self.phi - other.phi)

    def __neg__(self):
        return VectorField(-self.xi, -self.eta, -self.phi)

    def scale(self, c) -> "VectorField":
        c = _poly(c)
        return VectorField(self.xi * c, self.eta * c, self.phi * c)

    def __rmul__(self, c):
        return self.scale(c)

    def is_zero(self) -> bool:
        return not (self.xi or self.eta or self.phi)

    def __call__(self, f) -> Poly:
        """Act on a function of (x, t, u) as a derivation."""
        f = _poly(f)
        return self.xi * f.diff(X) + self.eta * f.diff(T) + self.phi * f.diff(U)

    def subs(self, mapping) -> "VectorField":
        return VectorField(*(c.subs(mapping) for c in self.components))

    def __str__(self):
        out = ""
        for coeff, d in zip(self.components, ("d_x", "d_t", "d_u")):
            if coeff.is_zero():
                continue
            sign = "+"
            if coeff.is_monomial() and next(iter(coeff.terms.values())) < 0:
                sign, coeff = "-", -coeff
            text = str(coeff)
            if coeff == Poly.const(1):
                term = d
            elif len(coeff) > 1 or "/" in text:
                term = f"({text})*{d}"
            else:
                term = f"{text}*{d}"
            if out:
                out += f" {sign} {term}"
            else:
                out = term if sign == "+" else f"-{term}"
        return out or "0"

    def to_dict(self) -> dict:
        return {"xi": str(self.xi), "eta": str(self.eta), "phi": str(self.phi)}

    @classmethod
    def from_strings(cls, xi="0", eta="0", phi="0") -> "VectorField":
        return cls(_poly(xi), _poly(eta), _poly(phi))


@dataclass(frozen=True)
class ProlongedField:
    base: VectorField
    order: int
    coeffs: dict  # (i, j) -> Poly, every multi-index with 1 <= i + j <= order

    def __getitem__(self, index) -> Poly:
        return self.coeffs[index]


class _Prolongator:
    """Memoized recursion ``phi^{J,i} = D_i phi^J - (D_i xi) u_{J,x} - (D_i eta) u_{J,t}``."""

    def __init__(self, v: VectorField, max_order: int):
        self.v = v
        self.max_order = max_order
        self.memo: dict = {(0, 0): v.phi}
        self.dxi = {X: v.xi.total_derivative(X, max_order), T: v.xi.total_derivative(T, max_order)}
        self.deta = {X: v.eta.total_derivative(X, max_order), T: v.eta.total_derivative(T, max_order)}

    def coeff(self, i: int, j: int) -> Poly:
        key = (i, j)
        if key in self.memo:
            return self.memo[key]
        if i + j > self.max_order:
            raise OrderOverflow(f"prolongation order {i + j} exceeds jet order {self.max_order}")
        if i > 0:
            prev, d, J = self.coeff(i - 1, j), X, (i - 1, j)
        else:
            prev, d, J = self.coeff(i, j - 1), T, (i, j - 1)
        ux = Poly.var(JetVar("u", J[0] + 1, J[1]))
        ut = Poly.var(JetVar("u", J[0], J[1] + 1))
        out = prev.total_derivative(d, self.max_order) - self.dxi[d] * ux - self.deta[d] * ut
        self.memo[key] = out
        return out


def prolong(v: VectorField, n: int, max_order: int = DEFAULT_MAX_ORDER) -> ProlongedField:
    """n-th prolongation: coefficients for every multi-index of order 1..n."""
    if n < 1:
        raise ValueError("prolongation order must be >= 1")
    if n > max_order:
        raise OrderOverflow(f"prolongation order {n} exceeds jet order {max_order}")
    pr = _Prolongator(v, max_order)
    coeffs = {}
    for total in range(1, n + 1):
        for j in range(total + 1):
            coeffs[(total - j, j)] = pr.coeff(total - j, j)
    return ProlongedField(v, n, coeffs)


def prolongation_closed_form(v: VectorField, index: tuple[int, int], max_order: int = DEFAULT_MAX_ORDER) -> Poly:
    """``D_J(phi - xi u_x - eta u_t) + xi u_{J,x} + eta u_{J,t}``, evaluated directly.

    Needs jet order ``|J| + 1``; kept as an independent check on ``prolong``.
    """
    i, j = index
    q = v.phi - v.xi * Poly.var(JetVar("u", 1, 0)) - v.eta * Poly.var(JetVar("u", 0, 1))
    for _ in range(i):
        q = q.total_derivative(X, max_order)
    for _ in range(j):
        q = q.total_derivative(T, max_order)
    return q + v.xi * Poly.var(JetVar("u", i + 1, j)) + v.eta * Poly.var(JetVar("u", i, j + 1))


def apply_prolonged(v: VectorField, n: int, f, max_order: int = DEFAULT_MAX_ORDER) -> Poly:
    """``Pr^(n) v`` applied to ``f``, expanded."""
    f = _poly(f)
    pr = _Prolongator(v, max_order)
    out = Poly()
    for w in sorted(f.variables(), key=lambda s: s.key):
        df = f.diff(w)
        if w == X:
            out = out + v.xi * df
        elif w == T:
            out = out + v.eta * df
        elif isinstance(w, JetVar):
            if w.dep != "u":
                raise ExprError(f"cannot prolong onto {w.name}")
            if w.order > n:
                raise OrderOverflow(f"{w.name} has order above {n}")
            out = out + pr.coeff(w.i, w.j) * df
    return out


def format_table(pf: ProlongedField) -> list[tuple[str, str]]:
    """(label, coefficient text) rows, e.g. ``("phi^xt", "...")``."""
    rows = []
    for (i, j), c in sorted(pf.coeffs.items(), key=lambda kv: (sum(kv[0]), -kv[0][0])):
        label = "phi^" + JetVar("u", i, j).name[2:]
        rows.append((label, to_str(c.to_expr())))
    return rows
