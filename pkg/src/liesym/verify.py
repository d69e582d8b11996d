"""Checking candidate solutions, exactly and on grids.

Exact residuals work over rational functions: a Laurent polynomial numerator
over a product of powers of non-monomial factors.  Sums are brought to a
common denominator without cancelling factors, so the residual vanishes iff
its numerator expands to zero.

Floating point only enters through ``residual_numeric``, ``residual_ode`` and
the Jacobi elliptic functions.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping

import numpy as np

from .determine import EvolutionPDE
from .expr import (
    CHI, T, X, Add, Const, Expr, ExprError, JetVar, Mul, Poly, Pow, Symbol, add,
    as_expr, mul, param, substitute_many,
)
from .linalg import solve
from .parser import parse

EXACT_TOL = 1e-10
FD_TOL = 1e-4


class DomainError(ValueError):
    pass


# ---------------------------------------------------------------------------
# rational functions


def _canonical_factor(p: Poly) -> tuple[Poly, Fraction]:
    """Split ``p`` into a factor with leading coefficient 1 and that coefficient."""
    _, c = p.sorted_terms()[0]
    return p.scale(1 / c), c


@dataclass(frozen=True)
class RationalFunction:
    num: Poly
    den: tuple = ()  # ((factor Poly, exponent > 0), ...)

    @staticmethod
    def const(c) -> "RationalFunction":
        return RationalFunction(Poly.const(c))

    @property
    def den_map(self) -> dict:
        return dict(self.den)

    @classmethod
    def _make(cls, num: Poly, den: Mapping) -> "RationalFunction":
        items = tuple(sorted(((f, k) for f, k in den.items() if k), key=lambda fk: str(fk[0])))
        return cls(num, items)

    def _lift(self, target: Mapping) -> Poly:
        num = self.num
        mine = self.den_map
        for f, k in target.items():
            extra = k - mine.get(f, 0)
            if extra:
                num = num * f ** extra
        return num

    def __add__(self, other: "RationalFunction") -> "RationalFunction":
        a, b = self.den_map, other.den_map
        common = {f: max(a.get(f, 0), b.get(f, 0)) for f in set(a) | set(b)}
        return RationalFunction._make(self._lift(common) + other._lift(common), common)

    def __neg__(self):
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other: "RationalFunction") -> "RationalFunction":
        d = self.den_map
        for f, k in other.den:
            d[f] = d.get(f, 0) + k
        return RationalFunction._make(self.num * other.num, d)

    def __pow__(self, n: int) -> "RationalFunction":
        if n < 0:
            return self.inverse() ** (-n)
        out = RationalFunction.const(1)
        for _ in range(n):
            out = out * self
        return out

    def inverse(self) -> "RationalFunction":
        if not self.num:
            raise ZeroDivisionError("inverse of the zero function")
        num = Poly.const(1)
        for f, k in self.den:
            num = num * f ** k
        if self.num.is_monomial():
            return RationalFunction(num * self.num.inverse())
        factor, c = _canonical_factor(self.num)
        return RationalFunction._make(num.scale(1 / c), {factor: 1})

    def diff(self, v: Symbol) -> "RationalFunction":
        """Quotient rule, raising the exponent of each factor that depends on ``v``."""
        dep = [(f, k) for f, k in self.den if v in f.variables()]
        if not dep:
            return RationalFunction(self.num.diff(v), self.den)
        prod = Poly.const(1)
        for f, _ in dep:
            prod = prod * f
        num = self.num.diff(v) * prod
        for f, k in dep:
            rest = Poly.const(1)
            for g, _ in dep:
                if g != f:
                    rest = rest * g
            num = num - self.num * f.diff(v) * rest * k
        d = self.den_map
        for f, _ in dep:
            d[f] += 1
        return RationalFunction._make(num, d)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def numerator(self) -> Poly:
        """Numerator with negative powers of single variables cleared."""
        lows: dict = {}
        for m in self.num.terms:
            for w, e in m:
                if e < 0:
                    lows[w] = min(lows.get(w, 0), e)
        out = self.num
        for w, e in lows.items():
            out = out * Poly.var(w, -e)
        return out

    def denominators(self) -> list[Poly]:
        """Every factor whose vanishing makes the function undefined."""
        out = []
        seen = set()
        for m in self.num.terms:
            for w, e in m:
                if e < 0 and w not in seen:
                    seen.add(w)
                    out.append(Poly.var(w))
        out.extend(f for f, _ in self.den)
        return out

    def evaluate(self, values: Mapping):
        out = self.num.evaluate(values)
        for f, k in self.den:
            out = out / f.evaluate(values) ** k
        return out

    def to_expr(self) -> Expr:
        factors = [self.num.to_expr()]
        for f, k in self.den:
            factors.append(Pow(f.to_expr(), -k))
        return mul(*factors)


def to_rational(e) -> RationalFunction:
    if isinstance(e, RationalFunction):
        return e
    if isinstance(e, Poly):
        return RationalFunction(e)
    if isinstance(e, str):
        e = parse(e)
    if isinstance(e, Const):
        return RationalFunction.const(e.value)
    if isinstance(e, (Symbol, JetVar)):
        return RationalFunction(Poly.var(e))
    if isinstance(e, Add):
        out = RationalFunction.const(0)
        for t in e.terms:
            out = out + to_rational(t)
        return out
    if isinstance(e, Mul):
        out = RationalFunction.const(1)
        for f in e.factors:
            out = out * to_rational(f)
        return out
    if isinstance(e, Pow):
        return to_rational(e.base) ** e.exp
    raise TypeError(type(e).__name__)


# ---------------------------------------------------------------------------
# exact residuals


def _solution_jets(sol: RationalFunction, pde: EvolutionPDE) -> dict:
    out = {}
    for w in pde.lhs.variables():
        if isinstance(w, JetVar):
            r = sol
            for _ in range(w.i):
                r = r.diff(X)
            for _ in range(w.j):
                r = r.diff(T)
            out[w] = r
    return out


def _apply(poly: Poly, values: Mapping) -> RationalFunction:
    total = RationalFunction.const(0)
    for m, c in poly.terms.items():
        term = RationalFunction.const(c)
        for w, e in m:
            term = term * (values[w] ** e if w in values else RationalFunction(Poly.var(w, e)))
        total = total + term
    return total


def residual_rational(solution, pde: EvolutionPDE) -> RationalFunction:
    """The equation evaluated on ``u = solution(x, t)``, as a rational function."""
    sol = to_rational(solution)
    if any(isinstance(w, JetVar) for w in sol.num.variables()):
        raise ExprError("solution may not contain jet variables")
    return _apply(pde.lhs, _solution_jets(sol, pde))


def residual_symbolic(solution, pde: EvolutionPDE) -> Expr:
    """Numerator of the residual over a common denominator; zero for exact solutions."""
    return residual_rational(solution, pde).numerator().to_expr()


def is_exact_solution(solution, pde: EvolutionPDE) -> bool:
    return residual_rational(solution, pde).is_zero()


# ---------------------------------------------------------------------------
# group actions


def transform_solution(which, s, f, a=None):
    """Image of the solution ``u = f(x, t)`` under one of the three groups.

    ``G1``: ``f(x - s, t)``; ``G2``: ``f(x, t - s)``; ``G3``: ``f(x - t*s, t) + s/a``.
    Expression inputs give expression outputs (``a`` defaults to the symbol);
    callables need a numeric ``a`` for ``G3``.
    """
    key = str(which).upper().lstrip("G")
    if key not in ("1", "2", "3"):
        raise ValueError(f"unknown group {which!r}")
    if callable(f) and not isinstance(f, Expr):
        s = float(s)
        if key == "1":
            return lambda x, t: f(x - s, t)
        if key == "2":
            return lambda x, t: f(x, t - s)
        if a is None:
            raise ValueError("G3 on a callable needs a numeric value of a")
        a = float(a)
        return lambda x, t: f(x - t * s, t) + s / a

    f = parse(f) if isinstance(f, str) else as_expr(f)
    s = parse(s) if isinstance(s, str) else as_expr(s)
    a = param("a") if a is None else (parse(a) if isinstance(a, str) else as_expr(a))
    if key == "1":
        return substitute_many(f, {X: X - s})
    if key == "2":
        return substitute_many(f, {T: T - s})
    return add(substitute_many(f, {X: X - T * s}), s / a)


# ---------------------------------------------------------------------------
# grids and numeric residuals


@dataclass(frozen=True)
class Grid:
    x_min: float
    x_max: float
    t_min: float
    t_max: float
    nx: int = 100
    nt: int = 100

    def __post_init__(self):
        if self.nx < 8 or self.nt < 8:
            raise ValueError("grids need at least 8 points per axis")
        if not (self.x_max > self.x_min and self.t_max > self.t_min):
            raise ValueError("empty grid range")

    @classmethod
    def parse(cls, text: str) -> "Grid":
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 6:
            raise ValueError("grid spec is x0,x1,t0,t1,nx,nt")
        x0, x1, t0, t1 = map(float, parts[:4])
        return cls(x0, x1, t0, t1, int(parts[4]), int(parts[5]))

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        x = np.linspace(self.x_min, self.x_max, self.nx)
        t = np.linspace(self.t_min, self.t_max, self.nt)
        return np.meshgrid(x, t, indexing="ij")

    def expanded(self) -> "Grid":
        """The grid grown by one cell on every side."""
        dx = (self.x_max - self.x_min) / (self.nx - 1)
        dt = (self.t_max - self.t_min) / (self.nt - 1)
        return Grid(self.x_min - dx, self.x_max + dx, self.t_min - dt, self.t_max + dt, self.nx + 2, self.nt + 2)


@dataclass
class ResidualReport:
    max_abs: float
    l2: float
    points_evaluated: int
    symbolic_zero: bool = False
    truncation_order: int | None = None
    x: np.ndarray | None = field(default=None, repr=False)
    t: np.ndarray | None = field(default=None, repr=False)
    residual: np.ndarray | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        return {
            "max_abs": float(self.max_abs),
            "l2": float(self.l2),
            "points_evaluated": self.points_evaluated,
            "symbolic_zero": self.symbolic_zero,
            "truncation_order": self.truncation_order,
        }


def _report(res: np.ndarray, **extra) -> ResidualReport:
    if not np.all(np.isfinite(res)):
        raise FloatingPointError("residual is NaN or infinite at some grid point")
    flat = np.abs(res).ravel()
    return ResidualReport(
        max_abs=float(flat.max()),
        l2=float(np.sqrt(np.mean(flat ** 2))),
        points_evaluated=int(flat.size),
        **extra,
    )


def _float_params(params: Mapping) -> dict:
    return {k: float(Fraction(v)) if not isinstance(v, float) else v for k, v in params.items()}


def fd_weights(deriv: int, accuracy: int) -> tuple[list[int], list[Fraction]]:
    """Centered finite-difference offsets and exact weights (unit spacing)."""
    if accuracy % 2:
        raise ValueError("centered stencils have even accuracy order")
    npts = 2 * ((deriv + 1) // 2) - 1 + accuracy
    half = npts // 2
    offsets = list(range(-half, half + 1))
    rows = [[Fraction(o) ** p / math.factorial(p) for o in offsets] for p in range(len(offsets))]
    rhs = [Fraction(int(p == deriv)) for p in range(len(offsets))]
    w = solve(rows, rhs)
    return offsets, w


def _balanced_step(deriv: int, accuracy: int, scale: float) -> float:
    # truncation h^p against round-off eps/h^n
    return scale * np.finfo(float).eps ** (1.0 / (deriv + accuracy))


def fd_derivative(f: Callable, point: np.ndarray, deriv: int, h: float, accuracy: int) -> np.ndarray:
    if deriv == 0:
        return f(point)
    offsets, w = fd_weights(deriv, accuracy)
    out = np.zeros_like(point, dtype=float)
    for o, c in zip(offsets, w):
        if c:
            out = out + float(c) * f(point + o * h)
    return out / h ** deriv


def _check_domain(sol: RationalFunction, grid: Grid, params: Mapping):
    g = grid.expanded()
    X_, T_ = g.mesh()
    values = dict(_float_params(params), x=X_, t=T_)
    for d in sol.denominators():
        v = np.asarray(d.evaluate(values), dtype=float) * np.ones_like(X_)
        if np.any(v == 0) or (np.any(v > 0) and np.any(v < 0)):
            raise DomainError(f"grid is within one cell of the singular locus {d} = 0")


def residual_numeric(solution, pde: EvolutionPDE, grid: Grid, params: Mapping,
                     accuracy: int = 4, step: float | None = None) -> ResidualReport:
    """Pointwise residual on ``grid``.

    Expression solutions are differentiated exactly and then evaluated.
    Callables ``f(x, t)`` are differentiated with centered differences of
    the given accuracy order.
    """
    X_, T_ = grid.mesh()
    fparams = _float_params(params)
    if not callable(solution) or isinstance(solution, Expr):
        sol = to_rational(solution)
        _check_domain(sol, grid, params)
        values = dict(fparams, x=X_, t=T_)
        jets = _solution_jets(sol, pde)
        for w, r in jets.items():
            values[w.name] = np.asarray(r.evaluate(values), dtype=float) * np.ones_like(X_)
        values["u"] = np.asarray(sol.evaluate(values), dtype=float) * np.ones_like(X_)
        res = np.asarray(pde.lhs.evaluate(values), dtype=float) * np.ones_like(X_)
        exact = residual_rational(sol, pde).is_zero()
        rep = _report(res, symbolic_zero=exact)
    else:
        scale = max(1.0, grid.x_max - grid.x_min, grid.t_max - grid.t_min)
        values = dict(fparams, x=X_, t=T_)
        values["u"] = np.asarray(solution(X_, T_), dtype=float)
        for w in pde.lhs.variables():
            if isinstance(w, JetVar) and w.order:
                if w.i and w.j:
                    raise ValueError("mixed derivatives of tabulated solutions are not supported")
                h = step or _balanced_step(w.order, accuracy, scale)
                if w.j:
                    values[w.name] = fd_derivative(lambda tt: solution(X_, tt), T_, w.j, h, accuracy)
                else:
                    values[w.name] = fd_derivative(lambda xx: solution(xx, T_), X_, w.i, h, accuracy)
        res = np.asarray(pde.lhs.evaluate(values), dtype=float) * np.ones_like(X_)
        rep = _report(res, truncation_order=accuracy)
    rep.x, rep.t, rep.residual = X_, T_, res
    return rep


def dump_residuals_csv(report: ResidualReport, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "t", "residual"])
        for x, t, r in zip(report.x.ravel(), report.t.ravel(), report.residual.ravel()):
            w.writerow([repr(float(x)), repr(float(t)), repr(float(r))])


# ---------------------------------------------------------------------------
# Jacobi elliptic functions


def _check_modulus(k: float):
    if not (0 <= k < 1):
        raise ValueError(f"modulus must lie in [0, 1), got {k}")


def ellipk(k: float) -> float:
    """Complete elliptic integral of the first kind, ``pi / (2 AGM(1, k'))``."""
    _check_modulus(k)
    a, b = 1.0, math.sqrt(1.0 - k * k)
    for _ in range(64):
        if abs(a - b) <= 4e-16 * a:
            break
        a, b = (a + b) / 2, math.sqrt(a * b)
    return math.pi / (2 * a)


def jacobi_sncndn(z, k: float):
    """``(sn, cn, dn)`` by the AGM / descending Landen scheme."""
    _check_modulus(k)
    z = np.asarray(z, dtype=float)
    if k == 0:
        return np.sin(z), np.cos(z), np.ones_like(z)
    m = k * k
    if m < 1e-8:
        s, c = np.sin(z), np.cos(z)
        corr = (z - s * c) * m / 4
        return s - corr * c, c + corr * s, 1 - m * s * s / 2
    a = [1.0]
    c = [k]
    b = math.sqrt(1.0 - m)
    while abs(c[-1]) > 1e-16:
        an, bn = a[-1], b
        a.append((an + bn) / 2)
        c.append((an - bn) / 2)
        b = math.sqrt(an * bn)
        if len(a) > 40:
            break
    n = len(a) - 1
    phi = (2.0 ** n) * a[-1] * z
    for j in range(n, 0, -1):
        phi = (phi + np.arcsin(c[j] / a[j] * np.sin(phi))) / 2
    sn, cn = np.sin(phi), np.cos(phi)
    # dn > 0 for real arguments and k < 1, so the square root is exact in sign
    return sn, cn, np.sqrt(1.0 - m * sn * sn)


def jacobi_sn(z, k: float):
    return jacobi_sncndn(z, k)[0]


def sn_ansatz(a0: float, A: float, B: float, m: float, k: float) -> Callable:
    """``a0 + A sn^4(m chi) + B sn(m chi) d/dchi sn(m chi)`` as a vectorized callable."""
    def profile(chi):
        sn, cn, dn = jacobi_sncndn(m * np.asarray(chi, dtype=float), k)
        return a0 + A * sn ** 4 + B * sn * (m * cn * dn)
    return profile


# ---------------------------------------------------------------------------
# ODE residuals


def residual_ode(ode, profile, interval: tuple[float, float], n_points: int = 100,
                 params: Mapping | None = None, accuracy: int = 8,
                 step: float | None = None) -> ResidualReport:
    """Residual of a reduced ODE on a profile ``zeta(chi)``.

    Expression profiles are differentiated exactly; callables use centered
    differences with step ``(b - a) / (8 * n_points)`` unless given.
    """
    expr = ode.expr if hasattr(ode, "expr") else ode
    lo, hi = map(float, interval)
    chi = np.linspace(lo, hi, n_points)
    values = dict(_float_params(params or {}), chi=chi)
    zjets = sorted((w for w in expr.variables() if isinstance(w, JetVar)), key=lambda w: w.i)
    if not callable(profile) or isinstance(profile, (Expr, Poly)):
        rf = to_rational(profile)
        jets = {}
        for w in zjets:
            r = rf
            for _ in range(w.i):
                r = r.diff(CHI)
            jets[w] = r
            values[w.name] = np.asarray(r.evaluate(values), dtype=float) * np.ones_like(chi)
        res = np.asarray(expr.evaluate(values), dtype=float) * np.ones_like(chi)
        return _report(res, symbolic_zero=_apply(expr, jets).is_zero())
    h = step if step is not None else (hi - lo) / (8 * n_points)
    if h <= np.finfo(float).eps * max(1.0, abs(hi), abs(lo)) * 16:
        raise FloatingPointError("finite-difference step underflow")
    for w in zjets:
        values[w.name] = np.asarray(fd_derivative(profile, chi, w.i, h, accuracy), dtype=float)
    res = np.asarray(expr.evaluate(values), dtype=float) * np.ones_like(chi)
    return _report(res, truncation_order=accuracy)

