from fractions import Fraction

import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from liesym.linalg import det, in_span, matvec, nullspace, rank, rref, solve

entries = st.fractions(min_value=-4, max_value=4, max_denominator=3)


def matrices(max_rows=6, max_cols=7):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(entries, min_size=c, max_size=c), min_size=r, max_size=r)
        )
    )


def to_sympy(rows):
    return sympy.Matrix([[sympy.Rational(v.numerator, v.denominator) for v in r] for r in rows])


def from_sympy(m):
    return [[Fraction(int(v.p), int(v.q)) for v in m.row(i)] for i in range(m.rows)]


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_rref_matches_sympy(rows):
    ours, pivots = rref(rows)
    ref, ref_pivots = to_sympy(rows).rref()
    assert list(ref_pivots) == pivots
    assert ours[:len(pivots)] == from_sympy(ref)[:len(pivots)]


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_nullspace_dimension_and_kernel(rows):
    ncols = len(rows[0])
    basis, free = nullspace(rows, ncols)
    assert len(basis) == ncols - rank(rows, ncols) == len(to_sympy(rows).nullspace())
    for v in basis:
        assert all(x == 0 for x in matvec(rows, v))


def test_nullspace_columns_are_free_variables():
    basis, free = nullspace([[1, 2, 0], [0, 0, 1]], 3)
    assert free == [1]
    assert basis == [[-2, 1, 0]]


def test_solve_and_span():
    assert solve([[2, 1], [1, 3]], [3, 5]) == [Fraction(4, 5), Fraction(7, 5)]
    assert solve([[1, 1], [1, 1]], [1, 2]) is None
    assert in_span([[1, 0, 1], [0, 1, 1]], [2, 3, 5]) == [2, 3]
    assert in_span([[1, 0, 1]], [0, 1, 0]) is None


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4).flatmap(lambda n: st.lists(st.lists(entries, min_size=n, max_size=n), min_size=n, max_size=n)))
def test_det_matches_sympy(rows):
    d = to_sympy(rows).det()
    assert det(rows) == Fraction(int(d.p), int(d.q))
