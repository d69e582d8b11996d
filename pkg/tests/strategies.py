"""Hypothesis strategies for random expressions over the u jet space."""

from fractions import Fraction

from hypothesis import strategies as st

from liesym.expr import T, U, X, Const, add, jet, mul, param, power

PARAMS = [param(n) for n in ("a", "b", "e")]


def jets(max_order=3):
    return st.tuples(st.integers(0, max_order), st.integers(0, max_order)).filter(
        lambda ij: ij[0] + ij[1] <= max_order
    ).map(lambda ij: jet("u", *ij))


def atoms(max_order=3):
    consts = st.fractions(min_value=-5, max_value=5, max_denominator=4).map(Const)
    return st.one_of(consts, st.sampled_from([X, T, U] + PARAMS), jets(max_order))


def exprs(max_depth=5, max_order=3):
    def extend(children):
        return st.one_of(
            st.lists(children, min_size=2, max_size=3).map(lambda xs: add(*xs)),
            st.lists(children, min_size=2, max_size=2).map(lambda xs: mul(*xs)),
            st.tuples(children, st.integers(0, 2)).map(lambda p: power(*p)),
        )
    return st.recursive(atoms(max_order), extend, max_leaves=2 ** max_depth // 4)
