"""Text DSL for expressions and equations.

Grammar (lowest to highest binding)::

    equation := expr ["=" expr]
    expr     := term (("+" | "-") term)*
    term     := unary (("*" | "/") unary)*
    unary    := "-" unary | "+" unary | power
    power    := atom (("^" | "**") unary)?
    atom     := NUMBER | NAME | "(" expr ")"

Names are ``x``, ``t``, ``chi``, the dependent variables ``u``/``zeta`` with an
optional derivative suffix (``u_x3``, ``u_xt``, ``u_xx``, ``u_{x^3}``,
``zeta_chi2``) and parameter identifiers.  Equations are normalized to
``lhs - rhs``.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable

from .expr import (
    CHI, DEFAULT_MAX_ORDER, DEFAULT_PARAMETERS, T, X, Const, Expr, ExprError,
    JetVar, param, power,
)

_GREEK = {"α": "alpha", "β": "beta", "γ": "gamma", "ε": "eps", "χ": "chi", "ζ": "zeta"}

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>\d+)
  | (?P<name>[A-Za-zαβγεχζ][A-Za-z0-9αβγεχζ]*(?:_(?:\{[^}]*\}|[A-Za-z0-9χ]+))?)
  | (?P<op>\*\*|[-+*/^()=])
    """,
    re.VERBOSE,
)

_SUFFIX = {"u": re.compile(r"(x|t)(?:\^?(\d+))?"), "zeta": re.compile(r"(chi|χ)(?:\^?(\d+))?")}


class ParseError(ExprError):
    def __init__(self, message: str, pos: int, text: str = ""):
        self.pos = pos
        self.text = text
        super().__init__(f"{message} at position {pos}")


def tokenize(text: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        if kind != "ws":
            val = m.group()
            if kind == "op" and val == "**":
                val = "^"
            out.append((kind, val, pos))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


def _jet_from_suffix(dep: str, suffix: str, pos: int, text: str) -> JetVar:
    body = suffix[1:-1] if suffix.startswith("{") else suffix
    pat = _SUFFIX[dep]
    counts = [0, 0]
    at = 0
    while at < len(body):
        m = pat.match(body, at)
        if not m or m.end() == at:
            raise ParseError(f"bad derivative suffix {suffix!r}", pos, text)
        n = int(m.group(2)) if m.group(2) else 1
        slot = 0 if m.group(1) in ("x", "chi", "χ") else 1
        counts[slot] += n
        at = m.end()
    return JetVar(dep, counts[0], counts[1])


class _Parser:
    def __init__(self, text: str, params: Iterable[str], max_order: int):
        self.text = text
        self.toks = tokenize(text)
        self.k = 0
        self.params = set(params)
        self.max_order = max_order

    def peek(self):
        return self.toks[self.k]

    def take(self):
        tok = self.toks[self.k]
        self.k += 1
        return tok

    def expect(self, val: str):
        kind, v, pos = self.take()
        if v != val or kind == "end":
            raise ParseError(f"expected {val!r}, found {v or 'end of input'!r}", pos, self.text)

    def equation(self) -> Expr:
        lhs = self.expr()
        kind, v, pos = self.peek()
        if v == "=":
            self.take()
            lhs = lhs - self.expr()
        kind, v, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected token {v!r}", pos, self.text)
        return lhs

    def expr(self) -> Expr:
        left = self.term()
        while self.peek()[1] in ("+", "-"):
            _, op, _ = self.take()
            right = self.term()
            left = left + right if op == "+" else left - right
        return left

    def term(self) -> Expr:
        left = self.unary()
        while self.peek()[1] in ("*", "/"):
            _, op, pos = self.take()
            right = self.unary()
            if op == "*":
                left = left * right
            else:
                try:
                    left = left * power(right, -1)
                except ZeroDivisionError:
                    raise ParseError("division by zero", pos, self.text) from None
                except ExprError as exc:
                    raise ParseError(str(exc), pos, self.text) from None
        return left

    def unary(self) -> Expr:
        if self.peek()[1] == "-":
            self.take()
            return -self.unary()
        if self.peek()[1] == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.peek()[1] == "^":
            _, _, pos = self.take()
            exp = self.unary()
            if not isinstance(exp, Const) or exp.value.denominator != 1:
                raise ParseError("exponent must be an integer literal", pos, self.text)
            try:
                return power(base, int(exp.value))
            except ZeroDivisionError:
                raise ParseError("division by zero", pos, self.text) from None
            except ExprError as exc:
                raise ParseError(str(exc), pos, self.text) from None
        return base

    def atom(self) -> Expr:
        kind, v, pos = self.take()
        if kind == "num":
            return Const(Fraction(int(v)))
        if v == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        if kind == "name":
            return self.name(v, pos)
        raise ParseError(f"unexpected {v or 'end of input'!r}", pos, self.text)

    def name(self, tok: str, pos: int) -> Expr:
        base, _, suffix = tok.partition("_")
        base = _GREEK.get(base, base)
        if base in ("u", "zeta"):
            v = _jet_from_suffix(base, suffix, pos, self.text) if suffix else JetVar(base)
            if v.order > self.max_order:
                raise ParseError(f"derivative order {v.order} above maximum {self.max_order}", pos, self.text)
            return v
        if suffix:
            raise ParseError(f"unknown symbol {tok!r}", pos, self.text)
        if base in ("x", "t", "chi"):
            return {"x": X, "t": T, "chi": CHI}[base]
        if base in self.params:
            return param(base)
        raise ParseError(f"unknown symbol {tok!r}", pos, self.text)


def parse(text: str, params: Iterable[str] | None = None, max_order: int = DEFAULT_MAX_ORDER) -> Expr:
    """Parse an expression or an equation (returned as ``lhs - rhs``)."""
    names = set(DEFAULT_PARAMETERS)
    if params is not None:
        names |= set(params)
    return _Parser(text, names, max_order).equation()
