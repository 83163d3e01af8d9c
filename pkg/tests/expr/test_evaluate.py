"""Tests for evaluation with first and second partials."""

import math

import numpy as np
from numpy.testing import assert_allclose
import pytest

from tsvar.expr import (
    DiffValue,
    DomainFaultError,
    ExprIntegrand,
    PartialIntegrand,
    UnboundVariableError,
    eval_with_partials,
    evaluate,
    parse,
    sample,
)


def test_vectorized_evaluation() -> None:
    """Test evaluation over arrays."""
    values = evaluate(parse("t^2 + 1", ("t",)), {"t": np.array([0.0, 1.0, 2.0])})
    assert_allclose(values, [1.0, 2.0, 5.0])


def test_product_partials() -> None:
    """Test the partials of x*y + sin(x)."""
    result = eval_with_partials(parse("x*y + sin(x)", ("x", "y")), {"x": 0.3, "y": 2.0})
    assert result.value == pytest.approx(0.6 + math.sin(0.3))
    assert result.d("x") == pytest.approx(2.0 + math.cos(0.3))
    assert result.d("y") == pytest.approx(0.3)
    assert result.d2("x", "x") == pytest.approx(-math.sin(0.3))
    assert result.d2("x", "y") == pytest.approx(1.0)
    assert result.d2("y", "x") == result.d2("x", "y")
    assert result.d2("y", "y") == 0.0


def test_power_partials() -> None:
    """Test constant and variable exponents."""
    fractional = eval_with_partials(parse("x^2.5", ("x",)), {"x": 2.0})
    assert fractional.value == pytest.approx(2.0**2.5)
    assert fractional.d("x") == pytest.approx(2.5 * 2.0**1.5)
    assert fractional.d2("x", "x") == pytest.approx(2.5 * 1.5 * 2.0**0.5)
    variable = eval_with_partials(parse("x^y", ("x", "y")), {"x": 2.0, "y": 3.0})
    assert variable.value == pytest.approx(8.0)
    assert variable.d("x") == pytest.approx(12.0)
    assert variable.d("y") == pytest.approx(8.0 * math.log(2.0))
    assert variable.d2("x", "x") == pytest.approx(12.0)
    assert variable.d2("y", "y") == pytest.approx(8.0 * math.log(2.0) ** 2)
    assert variable.d2("x", "y") == pytest.approx(4.0 * (1.0 + 3.0 * math.log(2.0)))


def test_partials_against_differences(rng: np.random.Generator) -> None:
    """Test first and second partials against central differences."""
    expression = parse("exp(x*y) - cos(x)/(1 + y^2) + x^3*log(2 + y^2)", ("x", "y"))
    step = 1e-4

    def f(x: float, y: float) -> float:
        return float(evaluate(expression, {"x": x, "y": y}))

    for _ in range(50):
        x, y = rng.uniform(-1.0, 1.0, 2)
        result = eval_with_partials(expression, {"x": x, "y": y})
        assert result.d("x") == pytest.approx((f(x + step, y) - f(x - step, y)) / (2 * step), rel=1e-6, abs=1e-7)
        assert result.d("y") == pytest.approx((f(x, y + step) - f(x, y - step)) / (2 * step), rel=1e-6, abs=1e-7)
        mixed = (f(x + step, y + step) - f(x + step, y - step) - f(x - step, y + step) + f(x - step, y - step)) / (
            4 * step * step
        )
        assert result.d2("x", "y") == pytest.approx(mixed, rel=1e-4, abs=1e-5)


def test_array_partials() -> None:
    """Test that partials broadcast over arrays."""
    x = np.array([1.0, 2.0, 3.0])
    result = eval_with_partials(parse("x^2*y", ("x", "y")), {"x": x, "y": 2.0})
    assert_allclose(result.d("x"), 4.0 * x)
    assert_allclose(result.d2("x", "x"), [4.0, 4.0, 4.0])


def test_numpy_scalars_defer() -> None:
    """Test that numpy scalars on the left combine with dual values."""
    result = np.float64(2.0) * DiffValue.variable("x", 3.0)
    assert isinstance(result, DiffValue)
    assert result.d("x") == 2.0


@pytest.mark.parametrize(
    ("text", "value"),
    [
        ("log(x)", -1.0),
        ("1/x", 0.0),
        ("x^0.5", -1.0),
        ("x^-1", 0.0),
        ("sqrt(x)", -4.0),
    ],
)
def test_domain_faults(text: str, value: float) -> None:
    """Test that undefined operations name their subexpression."""
    with pytest.raises(DomainFaultError):
        evaluate(parse(text, ("x",)), {"x": value})


@pytest.mark.parametrize("text", ["sqrt(x)", "abs(x)"])
def test_not_differentiable(text: str) -> None:
    """Test that sqrt and abs have values but no partials at 0."""
    expression = parse(text, ("x",))
    assert evaluate(expression, {"x": 0.0}) == 0.0
    with pytest.raises(DomainFaultError, match="not differentiable at 0"):
        eval_with_partials(expression, {"x": 0.0})
    assert eval_with_partials(expression, {"x": 4.0}).d("x") > 0.0


def test_unbound_variable() -> None:
    """Test that every declared variable needs a binding."""
    with pytest.raises(UnboundVariableError):
        evaluate(parse("x + y", ("x", "y")), {"x": 1.0})


def test_expression_integrand() -> None:
    """Test sampling an integrand over (t, y, v)."""
    integrand = ExprIntegrand.parse("t*y*v + v^2")
    t = np.array([0.0, 1.0])
    sampled = sample(integrand, t, np.array([2.0, 3.0]), np.array([1.0, -1.0]))
    assert_allclose(sampled.value, [1.0, -2.0])
    assert_allclose(sampled.y, [0.0, -1.0])
    assert_allclose(sampled.v, [2.0, 1.0])
    assert_allclose(sampled.yv, t)
    assert_allclose(sampled.vv, [2.0, 2.0])
    assert_allclose(sampled.yy, [0.0, 0.0])


def test_partial_integrand() -> None:
    """Test the integrand ∂L/∂v with its first partials."""
    base = ExprIntegrand.parse("t*y*v + v^2 + sin(y)")
    momentum = PartialIntegrand(base, "v")
    force = PartialIntegrand(base, "y", -1.0)
    t, y, v = np.array([2.0]), np.array([0.5]), np.array([3.0])
    assert_allclose(sample(momentum, t, y, v).value, [2.0 * 0.5 + 6.0])
    assert_allclose(sample(momentum, t, y, v).y, [2.0])
    assert_allclose(sample(force, t, y, v).value, [-(2.0 * 3.0 + math.cos(0.5))])
    assert_allclose(sample(force, t, y, v).v, [-2.0])
    assert not momentum.has_second_partials
    assert momentum.label == "d(t*y*v + v^2 + sin(y))/dv"
    with pytest.raises(ValueError, match="respect to y or v"):
        PartialIntegrand(base, "t")
