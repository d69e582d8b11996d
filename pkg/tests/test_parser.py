import pytest

from liesym.expr import Poly, expand, jet
from liesym.parser import ParseError, parse


def E(text, **kw):
    return expand(parse(text, **kw))


def test_flagship_equation():
    lhs = E("u_t + a*u*u_x + b*u_x3 + c*u_x4 + d*u_x5 = e*u_x2")
    assert lhs == E("u_t + a*u*u_x + b*u_x3 + c*u_x4 + d*u_x5 - e*u_x2")
    assert len(lhs) == 6


@pytest.mark.parametrize("text,ij", [
    ("u_x", (1, 0)), ("u_xx", (2, 0)), ("u_x3", (3, 0)), ("u_{x^3}", (3, 0)),
    ("u_xt", (1, 1)), ("u_x2t", (2, 1)), ("u_t2", (0, 2)), ("u", (0, 0)),
])
def test_derivative_tokens(text, ij):
    assert E(text) == Poly.var(jet("u", *ij))


def test_precedence_and_powers():
    assert E("2 + 3*4^2") == Poly.const(50)
    assert E("-u^2") == -E("u*u")
    assert E("u_x^2") == E("u_x*u_x")
    assert E("(1/2)*x") == E("x/2")
    assert E("3/6") == Poly.const(Poly.const(1).constant_value() / 2)


def test_greek_and_zeta():
    assert E("β*t") == E("beta*t")
    assert E("zeta_chi2 + zeta") == Poly.var(jet("zeta", 2)) + Poly.var(jet("zeta", 0))


@pytest.mark.parametrize("text", ["u_t +", "(x", "x )", "u_t ** 1.5", "3 $ 4", ""])
def test_syntax_errors_report_position(text):
    with pytest.raises(ParseError) as info:
        parse(text)
    assert info.value.pos is not None


def test_unknown_symbol():
    with pytest.raises(ParseError, match="unknown"):
        parse("q*u")
    assert E("q*u", params=["q"]) is not None


def test_order_limit():
    with pytest.raises(ParseError):
        parse("u_x7")
    assert E("u_x7", max_order=8) == Poly.var(jet("u", 7, 0))
