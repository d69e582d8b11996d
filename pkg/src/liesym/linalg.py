"""Exact row reduction over the rationals.

Rows are dense lists of ``Fraction``.  Pivots are taken on the leftmost
available column, so free columns are always the right-most ones of each
dependency chain and results are deterministic.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence


def _frac_rows(rows: Sequence[Sequence]) -> list[list[Fraction]]:
    return [[Fraction(v) for v in r] for r in rows]


def rref(rows: Sequence[Sequence], ncols: int | None = None) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form and the pivot columns."""
    m = _frac_rows(rows)
    if ncols is None:
        ncols = len(m[0]) if m else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == len(m):
            break
        pr = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        piv = m[r][c]
        if piv != 1:
            m[r] = [v / piv for v in m[r]]
        row = m[r]
        nz = [k for k in range(c, ncols) if row[k] != 0]
        for i in range(len(m)):
            if i != r:
                f = m[i][c]
                if f != 0:
                    mi = m[i]
                    for k in nz:
                        mi[k] -= f * row[k]
        pivots.append(c)
        r += 1
    return m[:r], pivots


def rank(rows: Sequence[Sequence], ncols: int | None = None) -> int:
    if not rows:
        return 0
    return len(rref(rows, ncols)[1])


def nullspace(rows: Sequence[Sequence], ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    """Basis of ``{v : A v = 0}``, one vector per free column.

    Returns the basis and the free columns it is indexed by.
    """
    if rows:
        red, pivots = rref(rows, ncols)
    else:
        red, pivots = [], []
    pivset = set(pivots)
    free = [c for c in range(ncols) if c not in pivset]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, p in zip(red, pivots):
            v[p] = -row[f]
        basis.append(v)
    return basis, free


def solve(rows: Sequence[Sequence], rhs: Sequence) -> list[Fraction] | None:
    """One exact solution of ``A x = b`` (free variables set to zero), or None."""
    if not rows:
        return None
    ncols = len(rows[0])
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    red, pivots = rref(aug, ncols + 1)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for row, p in zip(red, pivots):
        x[p] = row[ncols]
    return x


def in_span(vectors: Sequence[Sequence], target: Sequence) -> list[Fraction] | None:
    """Coefficients expressing ``target`` in the span of ``vectors``, or None."""
    if not vectors:
        return [] if all(v == 0 for v in target) else None
    cols = list(zip(*vectors))
    return solve([list(c) for c in cols], list(target))


def span_basis(vectors: Sequence[Sequence], dim: int) -> list[list[Fraction]]:
    """Row-reduced basis of the span (empty for the zero space)."""
    vs = [v for v in vectors if any(x != 0 for x in v)]
    if not vs:
        return []
    return rref(vs, dim)[0]


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> list[list[Fraction]]:
    n, k, m = len(a), len(b), len(b[0]) if b else 0
    return [[sum((a[i][p] * b[p][j] for p in range(k)), Fraction(0)) for j in range(m)] for i in range(n)]


def matvec(a: Sequence[Sequence], v: Sequence) -> list[Fraction]:
    return [sum((Fraction(x) * y for x, y in zip(row, v)), Fraction(0)) for row in a]


def identity(n: int) -> list[list[Fraction]]:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def is_zero_matrix(a: Sequence[Sequence]) -> bool:
    return all(v == 0 for row in a for v in row)


def det(a: Sequence[Sequence]) -> Fraction:
    m = _frac_rows(a)
    n = len(m)
    out = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if m[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            m[c], m[p] = m[p], m[c]
            out = -out
        out *= m[c][c]
        for i in range(c + 1, n):
            f = m[i][c] / m[c][c]
            if f:
                for k in range(c, n):
                    m[i][k] -= f * m[c][k]
    return out
