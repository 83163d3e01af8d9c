"""Tests for the expression parser."""

import pytest

from tsvar.expr import ExprSyntaxError, UndeclaredIdentifierError, evaluate, parse, pretty
from tsvar.expr.nodes import Binary, Call, Constant, Number, Unary, Variable


def _value(text: str, **bindings: float) -> float:
    return float(evaluate(parse(text, tuple(bindings)), bindings))


def test_precedence() -> None:
    """Test operator precedence and associativity."""
    assert _value("1 + 2 * 3") == 7.0
    assert _value("(1 + 2) * 3") == 9.0
    assert _value("2 ^ 3 ^ 2") == 512.0
    assert _value("-2 ^ 2") == -4.0
    assert _value("2 ^ -1") == 0.5
    assert _value("8 / 4 / 2") == 1.0
    assert _value("1 - 2 - 3") == -4.0


def test_tree_shape() -> None:
    """Test that unary minus binds looser than the power."""
    expression = parse("-x^2", ("x",))
    assert expression.root == Unary("-", Binary("^", Variable("x"), Number(2.0)))
    assert parse("sin(pi*t)", ("t",)).root == Call("sin", Binary("*", Constant("pi"), Variable("t")))


def test_numbers() -> None:
    """Test the literal formats."""
    assert _value("1e-3") == 0.001
    assert _value(".5 + 2.") == 2.5
    assert _value("1.5E2") == 150.0


def test_constants_and_functions() -> None:
    """Test the built-in names."""
    assert _value("cos(pi)") == pytest.approx(-1.0)
    assert _value("log(e)") == pytest.approx(1.0)
    assert _value("sqrt(16) + abs(-2) + exp(0)") == 7.0


def test_declared_variables_shadow_constants() -> None:
    """Test that a declared variable named like a constant wins."""
    assert _value("e + 1", e=2.0) == 3.0


def test_round_trip() -> None:
    """Test that the pretty print parses back to the same tree."""
    for text in ("t*y*v + v^2", "-x^2 + sin(x)/(1 + y^2)", "exp(-t)*y^3 - 2^-y", "((x))"):
        variables = ("t", "x", "y", "v")
        expression = parse(text, variables)
        assert parse(pretty(expression.root), variables).root == expression.root


@pytest.mark.parametrize(
    ("text", "column"),
    [
        ("x + ", 5),
        ("x $ y", 3),
        ("x y", 3),
        ("sin x", 5),
        ("(x", 3),
        ("x)", 2),
        ("* x", 1),
        ("x + 1e400", 5),
    ],
)
def test_syntax_errors(text: str, column: int) -> None:
    """Test that syntax errors carry the column of the offending token."""
    with pytest.raises(ExprSyntaxError) as error:
        parse(text, ("x", "y"))
    assert error.value.column == column


def test_empty_expression() -> None:
    """Test that blank text is refused."""
    with pytest.raises(ExprSyntaxError):
        parse("   ", ("x",))


def test_undeclared_identifier() -> None:
    """Test that unknown names are reported with their column."""
    with pytest.raises(UndeclaredIdentifierError) as error:
        parse("t*y + z", ("t", "y"))
    assert error.value.name == "z"
    assert error.value.column == 7
