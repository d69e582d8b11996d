"""Symbolic expressions over a jet space.

Two representations live here:

* ``Expr`` trees (constants, symbols, jet variables, sums, products and
  integer powers) as produced by the parser and used for printing and
  structural substitution.
* ``Poly``, the canonical expanded form: a map from monomials to exact
  rational coefficients.  Negative exponents are allowed on single
  variables, so a ``Poly`` is really a Laurent polynomial.  Two trees are
  equal as functions iff their expansions are identical.

Jet variables carry a dependent-variable tag and a multi-index.  ``u`` lives
over ``(x, t)``; ``zeta`` lives over the single invariant ``chi`` and only
uses the first slot of the multi-index.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce as _fold
from typing import Iterable, Mapping, Union

DEFAULT_MAX_ORDER = 6

# independent variables in their fixed global order
INDEPENDENT = ("x", "t", "chi")

# dependent variable -> the independent variables its multi-index counts
JET_SPACES = {"u": ("x", "t"), "zeta": ("chi",)}

DEFAULT_PARAMETERS = (
    "a", "b", "c", "d", "e", "alpha", "beta", "gamma", "s", "eps",
    "c0", "c1", "c2", "c3", "k", "m", "A", "B", "a0",
)


class ExprError(ValueError):
    pass


class OrderOverflow(ExprError):
    """A derivative would leave the configured jet space."""


class NotPolynomial(ExprError):
    """Expansion hit a negative power of a compound expression."""


# ---------------------------------------------------------------------------
# tree nodes


class Expr:
    __slots__ = ()

    def __add__(self, other):
        return add(self, as_expr(other))

    def __radd__(self, other):
        return add(as_expr(other), self)

    def __sub__(self, other):
        return add(self, mul(Const(-1), as_expr(other)))

    def __rsub__(self, other):
        return add(as_expr(other), mul(Const(-1), self))

    def __mul__(self, other):
        return mul(self, as_expr(other))

    def __rmul__(self, other):
        return mul(as_expr(other), self)

    def __neg__(self):
        return mul(Const(-1), self)

    def __truediv__(self, other):
        return mul(self, power(as_expr(other), -1))

    def __rtruediv__(self, other):
        return mul(as_expr(other), power(self, -1))

    def __pow__(self, n):
        if not isinstance(n, int):
            raise ExprError("only integer exponents are supported")
        return power(self, n)

    def __str__(self):
        return to_str(self)


@dataclass(frozen=True, slots=True)
class Const(Expr):
    value: Fraction

    def __post_init__(self):
        if not isinstance(self.value, Fraction):
            object.__setattr__(self, "value", Fraction(self.value))


@dataclass(frozen=True, slots=True)
class Symbol(Expr):
    name: str
    kind: str = "parameter"  # "independent" | "parameter"

    def __post_init__(self):
        if self.kind not in ("independent", "parameter"):
            raise ExprError(f"bad symbol kind {self.kind!r}")

    @property
    def key(self):
        if self.kind == "independent":
            return (0, INDEPENDENT.index(self.name), self.name)
        return (2, 0, self.name)


@dataclass(frozen=True, slots=True)
class JetVar(Expr):
    dep: str
    i: int = 0
    j: int = 0

    def __post_init__(self):
        if self.dep not in JET_SPACES:
            raise ExprError(f"unknown dependent variable {self.dep!r}")
        if self.i < 0 or self.j < 0:
            raise ExprError("negative derivative count")
        if len(JET_SPACES[self.dep]) == 1 and self.j:
            raise ExprError(f"{self.dep} has a single independent variable")

    @property
    def order(self) -> int:
        return self.i + self.j

    @property
    def key(self):
        return (1, self.dep, self.i + self.j, -self.i, self.j)

    @property
    def name(self) -> str:
        return jet_name(self)

    def shifted(self, di: int = 0, dj: int = 0) -> "JetVar":
        return JetVar(self.dep, self.i + di, self.j + dj)


@dataclass(frozen=True, slots=True)
class Add(Expr):
    terms: tuple


@dataclass(frozen=True, slots=True)
class Mul(Expr):
    factors: tuple


@dataclass(frozen=True, slots=True)
class Pow(Expr):
    base: Expr
    exp: int


Var = Union[Symbol, JetVar]

X = Symbol("x", "independent")
T = Symbol("t", "independent")
CHI = Symbol("chi", "independent")
U = JetVar("u")
ZETA = JetVar("zeta")
ZERO = Const(0)
ONE = Const(1)


def param(name: str) -> Symbol:
    return Symbol(name, "parameter")


def jet(dep: str = "u", i: int = 0, j: int = 0) -> JetVar:
    return JetVar(dep, i, j)


def jet_name(v: JetVar) -> str:
    names = JET_SPACES[v.dep]
    parts = []
    for letter, count in zip(names, (v.i, v.j)):
        if count == 1:
            parts.append(letter)
        elif count > 1:
            parts.append(f"{letter}{count}")
    if not parts:
        return v.dep
    return v.dep + "_" + "".join(parts)


def as_expr(obj) -> Expr:
    if isinstance(obj, Expr):
        return obj
    if isinstance(obj, Poly):
        return obj.to_expr()
    if isinstance(obj, (int, Fraction)):
        return Const(Fraction(obj))
    raise TypeError(f"cannot convert {type(obj).__name__} to Expr")


def add(*items: Expr) -> Expr:
    terms = []
    const = Fraction(0)
    for it in items:
        parts = it.terms if isinstance(it, Add) else (it,)
        for p in parts:
            if isinstance(p, Const):
                const += p.value
            else:
                terms.append(p)
    if const != 0 or not terms:
        terms.append(Const(const))
    if len(terms) == 1:
        return terms[0]
    return Add(tuple(terms))


def mul(*items: Expr) -> Expr:
    factors = []
    const = Fraction(1)
    for it in items:
        parts = it.factors if isinstance(it, Mul) else (it,)
        for p in parts:
            if isinstance(p, Const):
                const *= p.value
            else:
                factors.append(p)
    if const == 0:
        return ZERO
    if const != 1 or not factors:
        factors.insert(0, Const(const))
    if len(factors) == 1:
        return factors[0]
    return Mul(tuple(factors))


def power(base: Expr, n: int) -> Expr:
    if n == 0:
        return ONE
    if n == 1:
        return base
    if isinstance(base, Const):
        if base.value == 0 and n < 0:
            raise ZeroDivisionError("division by zero")
        return Const(base.value ** n)
    if n < 0 and has_jets(base) and not isinstance(base, JetVar):
        raise ExprError(f"cannot divide by an expression containing jet variables: {base}")
    if isinstance(base, Pow):
        return power(base.base, base.exp * n)
    return Pow(base, n)


# ---------------------------------------------------------------------------
# tree traversal


def atoms(e: Expr) -> set:
    """All symbols and jet variables occurring in ``e``."""
    if isinstance(e, (Symbol, JetVar)):
        return {e}
    if isinstance(e, Const):
        return set()
    if isinstance(e, Pow):
        return atoms(e.base)
    kids = e.terms if isinstance(e, Add) else e.factors
    out = set()
    for k in kids:
        out |= atoms(k)
    return out


def has_jets(e: Expr) -> bool:
    return any(isinstance(a, JetVar) for a in atoms(e))


def jet_order(e) -> int:
    vs = e.variables() if isinstance(e, Poly) else atoms(e)
    return max((v.order for v in vs if isinstance(v, JetVar)), default=-1)


def diff_partial(e: Expr, s: Var) -> Expr:
    """Formal partial derivative, all other coordinates held fixed."""
    if isinstance(e, Const):
        return ZERO
    if isinstance(e, (Symbol, JetVar)):
        return ONE if e == s else ZERO
    if isinstance(e, Add):
        return add(*(diff_partial(t, s) for t in e.terms))
    if isinstance(e, Mul):
        out = []
        fs = e.factors
        for k, f in enumerate(fs):
            df = diff_partial(f, s)
            if df == ZERO:
                continue
            out.append(mul(*fs[:k], df, *fs[k + 1:]))
        return add(*out) if out else ZERO
    if isinstance(e, Pow):
        db = diff_partial(e.base, s)
        if db == ZERO:
            return ZERO
        return mul(Const(e.exp), power(e.base, e.exp - 1), db)
    raise TypeError(type(e).__name__)


def _jet_step(v: JetVar, direction: Symbol, max_order: int):
    names = JET_SPACES[v.dep]
    if direction.name not in names:
        return None
    w = v.shifted(1, 0) if names.index(direction.name) == 0 else v.shifted(0, 1)
    if w.order > max_order:
        raise OrderOverflow(f"D_{direction.name}({v.name}) exceeds jet order {max_order}")
    return w


def total_derivative(e: Expr, direction: Symbol, max_order: int = DEFAULT_MAX_ORDER) -> Expr:
    """``D_dir e``: explicit partial plus the chain rule through every jet variable."""
    if isinstance(e, Const):
        return ZERO
    if isinstance(e, Symbol):
        return ONE if e == direction else ZERO
    if isinstance(e, JetVar):
        w = _jet_step(e, direction, max_order)
        return ZERO if w is None else w
    if isinstance(e, Add):
        return add(*(total_derivative(t, direction, max_order) for t in e.terms))
    if isinstance(e, Mul):
        out = []
        fs = e.factors
        for k, f in enumerate(fs):
            df = total_derivative(f, direction, max_order)
            if df == ZERO:
                continue
            out.append(mul(*fs[:k], df, *fs[k + 1:]))
        return add(*out) if out else ZERO
    if isinstance(e, Pow):
        db = total_derivative(e.base, direction, max_order)
        if db == ZERO:
            return ZERO
        return mul(Const(e.exp), power(e.base, e.exp - 1), db)
    raise TypeError(type(e).__name__)


def substitute(e: Expr, target: Var, replacement: Expr) -> Expr:
    """Replace every occurrence of a symbol or jet variable.  Not expanded."""
    if not isinstance(target, (Symbol, JetVar)):
        raise ExprError("substitution target must be a symbol or jet variable")
    return substitute_many(e, {target: replacement})


def substitute_many(e: Expr, mapping: Mapping[Var, Expr]) -> Expr:
    if isinstance(e, Const):
        return e
    if isinstance(e, (Symbol, JetVar)):
        return as_expr(mapping[e]) if e in mapping else e
    if isinstance(e, Add):
        return add(*(substitute_many(t, mapping) for t in e.terms))
    if isinstance(e, Mul):
        return mul(*(substitute_many(f, mapping) for f in e.factors))
    if isinstance(e, Pow):
        return power(substitute_many(e.base, mapping), e.exp)
    raise TypeError(type(e).__name__)


def evaluate(e: Expr, values: Mapping[str, object]):
    """Evaluate a tree numerically.  Works with Fractions, floats or numpy arrays."""
    as_float = _is_float_ctx(values)

    def ev(n):
        if isinstance(n, Const):
            return float(n.value) if as_float else n.value
        if isinstance(n, (Symbol, JetVar)):
            try:
                return values[n.name]
            except KeyError:
                raise ExprError(f"no value for {n.name}") from None
        if isinstance(n, Add):
            return _fold(lambda acc, t: acc + ev(t), n.terms[1:], ev(n.terms[0]))
        if isinstance(n, Mul):
            return _fold(lambda acc, f: acc * ev(f), n.factors[1:], ev(n.factors[0]))
        if isinstance(n, Pow):
            b = ev(n.base)
            return 1 / b ** (-n.exp) if n.exp < 0 else b ** n.exp
        raise TypeError(type(n).__name__)

    return ev(e)


# ---------------------------------------------------------------------------
# printing

_PREC_ADD, _PREC_MUL, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4


def _fmt_fraction(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _to_str(e: Expr) -> tuple[str, int]:
    if isinstance(e, Const):
        s = _fmt_fraction(e.value)
        if e.value < 0 or e.value.denominator != 1:
            return s, _PREC_ADD if e.value < 0 else _PREC_MUL
        return s, _PREC_ATOM
    if isinstance(e, Symbol):
        return e.name, _PREC_ATOM
    if isinstance(e, JetVar):
        return jet_name(e), _PREC_ATOM
    if isinstance(e, Add):
        out = ""
        for k, term in enumerate(e.terms):
            s, p = _to_str(term)
            neg = False
            if k and isinstance(term, Mul) and isinstance(term.factors[0], Const) and term.factors[0].value < 0:
                s, p = _to_str(mul(Const(-term.factors[0].value), *term.factors[1:]))
                neg = True
            elif k and isinstance(term, Const) and term.value < 0:
                s, p = _to_str(Const(-term.value))
                neg = True
            if k:
                out += " - " if neg else " + "
                if p <= _PREC_ADD and neg:
                    s = f"({s})"
            out += s
        return out, _PREC_ADD
    if isinstance(e, Mul):
        num, den = [], []
        sign = ""
        for f in e.factors:
            if isinstance(f, Const):
                q = f.value
                if q < 0:
                    sign, q = "-", -q
                if q.numerator != 1:
                    num.append(Const(q.numerator))
                if q.denominator != 1:
                    den.append(Const(q.denominator))
            elif isinstance(f, Pow) and f.exp < 0:
                den.append(power(f.base, -f.exp))
            else:
                num.append(f)

        def join(parts):
            out = []
            for f in parts:
                s, p = _to_str(f)
                out.append(f"({s})" if p <= _PREC_MUL and len(parts) > 1 else s)
            return "*".join(out), (_PREC_MUL if len(parts) > 1 else _to_str(parts[0])[1])

        ntext, nprec = join(num) if num else ("1", _PREC_ATOM)
        if den:
            if nprec <= _PREC_ADD:
                ntext = f"({ntext})"
            dtext, dprec = join(den)
            if len(den) > 1 or dprec < _PREC_ATOM:
                dtext = f"({dtext})"
            ntext = f"{ntext}/{dtext}"
            nprec = _PREC_MUL
        if sign:
            return sign + (f"({ntext})" if nprec <= _PREC_ADD else ntext), _PREC_ADD
        return ntext, nprec
    if isinstance(e, Pow):
        s, p = _to_str(e.base)
        if p < _PREC_ATOM:
            s = f"({s})"
        if e.exp < 0:
            inner = s if e.exp == -1 else f"{s}^{-e.exp}"
            return f"1/{inner}", _PREC_MUL
        return f"{s}^{e.exp}", _PREC_POW
    raise TypeError(type(e).__name__)


def to_str(e: Expr) -> str:
    """DSL text for ``e``; parses back to an equal expansion."""
    return _to_str(e)[0]


# ---------------------------------------------------------------------------
# canonical polynomials

Monomial = tuple  # ((var, exp), ...) sorted by var.key


def _mono_mul(m1: Monomial, m2: Monomial) -> Monomial:
    if not m1:
        return m2
    if not m2:
        return m1
    d = dict(m1)
    for v, k in m2:
        n = d.get(v, 0) + k
        if n:
            d[v] = n
        else:
            del d[v]
    return tuple(sorted(d.items(), key=lambda vk: vk[0].key))


def _mono_pow(m: Monomial, n: int) -> Monomial:
    return tuple((v, k * n) for v, k in m) if n else ()


def _mono_sort_key(m: Monomial):
    deg = sum(k for v, k in m if not (isinstance(v, Symbol) and v.kind == "parameter"))
    return (deg, tuple((v.key, -k) for v, k in m))


class Poly:
    """Canonical expanded form with exact rational coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, Fraction] | None = None):
        self.terms = {m: Fraction(c) for m, c in (terms or {}).items() if c != 0}

    # construction
    @classmethod
    def const(cls, c) -> "Poly":
        return cls({(): Fraction(c)})

    @classmethod
    def var(cls, v: Var, exp: int = 1) -> "Poly":
        if exp == 0:
            return cls.const(1)
        return cls({((v, exp),): Fraction(1)})

    @classmethod
    def _raw(cls, terms: dict) -> "Poly":
        p = cls.__new__(cls)
        p.terms = terms
        return p

    # queries
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.const(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def variables(self) -> set:
        return {v for m in self.terms for v, _ in m}

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and () in self.terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ExprError(f"{self} is not a constant")
        return self.terms.get((), Fraction(0))

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def sorted_terms(self) -> list:
        return sorted(self.terms.items(), key=lambda mc: _mono_sort_key(mc[0]))

    def degree(self, v: Var) -> int:
        return max((dict(m).get(v, 0) for m in self.terms), default=0)

    def collect(self, variables: Iterable[Var]) -> dict:
        """Split into {monomial in ``variables``: coefficient Poly in the rest}."""
        vs = set(variables)
        out: dict = {}
        for m, c in self.terms.items():
            inside = tuple(p for p in m if p[0] in vs)
            rest = tuple(p for p in m if p[0] not in vs)
            bucket = out.setdefault(inside, {})
            bucket[rest] = bucket.get(rest, 0) + c
        return {k: Poly(v) for k, v in out.items()}

    # arithmetic
    def __add__(self, other):
        other = _as_poly(other)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            n = terms.get(m, 0) + c
            if n:
                terms[m] = n
            else:
                terms.pop(m, None)
        return Poly._raw(terms)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def scale(self, c) -> "Poly":
        c = Fraction(c)
        if c == 0:
            return Poly()
        return Poly._raw({m: v * c for m, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = _as_poly(other)
        terms: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                n = terms.get(m, 0) + c1 * c2
                if n:
                    terms[m] = n
                else:
                    terms.pop(m, None)
        return Poly._raw(terms)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = Poly.const(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    def inverse(self) -> "Poly":
        if len(self.terms) != 1:
            raise NotPolynomial(f"cannot invert non-monomial {self}")
        (m, c), = self.terms.items()
        return Poly._raw({_mono_pow(m, -1): 1 / c})

    # calculus
    def diff(self, v: Var) -> "Poly":
        terms: dict = {}
        for m, c in self.terms.items():
            for idx, (w, k) in enumerate(m):
                if w == v:
                    if k == 1:
                        nm = m[:idx] + m[idx + 1:]
                    else:
                        nm = m[:idx] + ((w, k - 1),) + m[idx + 1:]
                    n = terms.get(nm, 0) + c * k
                    if n:
                        terms[nm] = n
                    else:
                        terms.pop(nm, None)
                    break
        return Poly._raw(terms)

    def total_derivative(self, direction: Symbol, max_order: int = DEFAULT_MAX_ORDER) -> "Poly":
        out = self.diff(direction)
        for v in self.variables():
            if isinstance(v, JetVar):
                w = _jet_step(v, direction, max_order)
                if w is not None:
                    out = out + self.diff(v) * Poly.var(w)
        return out

    def subs(self, mapping: Mapping[Var, "Poly"]) -> "Poly":
        """Substitute variables by polynomials, expanding the result."""
        mapping = {k: _as_poly(v) for k, v in mapping.items()}
        if not any(v in mapping for v in self.variables()):
            return self
        cache: dict = {}

        def pw(v, k):
            key = (v, k)
            if key not in cache:
                cache[key] = mapping[v] ** k
            return cache[key]

        out: dict = {}
        for m, c in self.terms.items():
            keep = []
            prod = None
            for v, k in m:
                if v in mapping:
                    f = pw(v, k)
                    prod = f if prod is None else prod * f
                else:
                    keep.append((v, k))
            if prod is None:
                piece = {tuple(keep): c}
            else:
                piece = (prod * Poly._raw({tuple(keep): c})).terms
            for mm, cc in piece.items():
                n = out.get(mm, 0) + cc
                if n:
                    out[mm] = n
                else:
                    out.pop(mm, None)
        return Poly._raw(out)

    def evaluate(self, values: Mapping):
        """Numeric value; ``values`` keyed by variable name (Fractions, floats or arrays)."""
        total = 0
        for m, c in self.terms.items():
            term = c if not _is_float_ctx(values) else float(c)
            for v, k in m:
                try:
                    x = values[v.name]
                except KeyError:
                    raise ExprError(f"no value for {v.name}") from None
                term = term * (x ** k if k > 0 else 1 / x ** (-k))
            total = total + term
        return total

    # conversion
    def to_expr(self) -> Expr:
        if not self.terms:
            return ZERO
        terms = []
        for m, c in self.sorted_terms():
            factors = [Const(c)]
            for v, k in sorted(m, key=lambda vk: (_print_group(vk[0]), vk[0].key)):
                factors.append(v if k == 1 else Pow(v, k))
            terms.append(mul(*factors))
        return add(*terms)

    def __str__(self):
        return to_str(self.to_expr())

    def __repr__(self):
        return f"Poly({self})"


def _print_group(v) -> int:
    if isinstance(v, Symbol) and v.kind == "parameter":
        return 0
    return 1 if isinstance(v, Symbol) else 2


def _is_float_ctx(values: Mapping) -> bool:
    return any(isinstance(x, float) or hasattr(x, "dtype") for x in values.values())


def _as_poly(obj) -> Poly:
    if isinstance(obj, Poly):
        return obj
    if isinstance(obj, (int, Fraction)):
        return Poly.const(obj)
    if isinstance(obj, Expr):
        return expand(obj)
    raise TypeError(f"cannot convert {type(obj).__name__} to Poly")


def expand(e: Expr) -> Poly:
    """Fully distributed canonical form."""
    if isinstance(e, Poly):
        return e
    if isinstance(e, Const):
        return Poly.const(e.value)
    if isinstance(e, (Symbol, JetVar)):
        return Poly.var(e)
    if isinstance(e, Add):
        out = Poly()
        for t in e.terms:
            out = out + expand(t)
        return out
    if isinstance(e, Mul):
        out = Poly.const(1)
        for f in e.factors:
            out = out * expand(f)
            if out.is_zero():
                break
        return out
    if isinstance(e, Pow):
        b = expand(e.base)
        if e.exp < 0 and not b.is_monomial():
            raise NotPolynomial(f"negative power of a sum: {e}")
        return b ** e.exp
    raise TypeError(type(e).__name__)


def equal(e1, e2) -> bool:
    """Semantic equality via canonical expansion."""
    return _as_poly(e1) == _as_poly(e2)
