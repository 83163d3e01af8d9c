"""Evaluation of expressions, plain or with first and second partials."""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Mapping
from typing import Final

import numpy as np

from .. import TsvarError
from ..constants import ROOT_LOGGER_NAME
from .dual import DiffValue, Scalar
from .nodes import Binary, Call, Constant, Expression, Node, Number, Unary, Variable, pretty, variables_of

LOGGER = logging.getLogger(ROOT_LOGGER_NAME)

Value = Scalar | DiffValue

_CONSTANTS: Final = {"pi": math.pi, "e": math.e}


class DomainFaultError(TsvarError):
    """An expression was evaluated outside the domain of one of its operations."""

    def __init__(self, subexpression: str, reason: str) -> None:
        """Create a DomainFaultError instance."""
        self.subexpression = subexpression
        self.reason = reason
        super().__init__(f"{reason} in '{subexpression}'")


class UnboundVariableError(TsvarError):
    """A declared variable has no binding."""

    def __init__(self, name: str, expression: str) -> None:
        """Create an UnboundVariableError instance."""
        super().__init__(f"Variable '{name}' of '{expression}' is not bound")


def _raw(value: Value) -> Scalar:
    return value.value if isinstance(value, DiffValue) else value


def _check_positive(raw: Scalar) -> str | None:
    return "log of a non-positive value" if np.any(raw <= 0) else None


def _check_sqrt(raw: Scalar) -> str | None:
    return "square root of a negative value" if np.any(raw < 0) else None


# name: (function, first derivative, second derivative, domain check)
_FUNCTIONS: Final[dict[str, tuple[Callable, Callable, Callable, Callable[[Scalar], str | None] | None]]] = {
    "sin": (np.sin, np.cos, lambda x: -np.sin(x), None),
    "cos": (np.cos, lambda x: -np.sin(x), lambda x: -np.cos(x), None),
    "exp": (np.exp, np.exp, np.exp, None),
    "log": (np.log, lambda x: 1.0 / x, lambda x: -1.0 / (x * x), _check_positive),
    "sqrt": (np.sqrt, lambda x: 0.5 / np.sqrt(x), lambda x: -0.25 / (x * np.sqrt(x)), _check_sqrt),
    "abs": (np.abs, np.sign, lambda x: np.zeros_like(x) if isinstance(x, np.ndarray) else 0.0, None),
}


def _call(node: Call, argument: Value) -> Value:
    function, slope, curvature, check = _FUNCTIONS[node.function]
    raw = _raw(argument)
    if check is not None and (reason := check(raw)) is not None:
        raise DomainFaultError(pretty(node), reason)
    if not isinstance(argument, DiffValue):
        return function(raw)
    if node.function == "sqrt" and np.any(raw == 0):
        raise DomainFaultError(pretty(node), "square root is not differentiable at 0")
    if node.function == "abs" and np.any(raw == 0):
        raise DomainFaultError(pretty(node), "abs is not differentiable at 0")
    return argument.chain(function(raw), slope(raw), curvature(raw))


def _repeat(base: Value, count: int) -> Value:
    result = base
    for _ in range(count - 1):
        result = result * base
    return result


def _integer_power(node: Binary, base: Value, exponent: int) -> Value:
    if exponent == 0:
        return 1.0
    if exponent > 0:
        return _repeat(base, exponent)
    if np.any(_raw(base) == 0):
        raise DomainFaultError(pretty(node), "zero raised to a negative power")
    return 1.0 / _repeat(base, -exponent)


def _power(node: Binary, env: Mapping[str, Value]) -> Value:
    base = _evaluate(node.left, env)
    raw = _raw(base)
    if not variables_of(node.right):
        exponent = float(np.asarray(_raw(_evaluate(node.right, env))))
        if exponent.is_integer():
            return _integer_power(node, base, int(exponent))
        if np.any(raw < 0):
            raise DomainFaultError(pretty(node), "negative base with a non-integer exponent")
        if exponent < 0 and np.any(raw == 0):
            raise DomainFaultError(pretty(node), "zero raised to a negative power")
        if not isinstance(base, DiffValue):
            return np.power(raw, exponent)
        if np.any(raw == 0) and exponent < 2:
            raise DomainFaultError(pretty(node), "power is not differentiable at 0")
        return base.chain(
            np.power(raw, exponent),
            exponent * np.power(raw, exponent - 1),
            exponent * (exponent - 1) * np.power(raw, exponent - 2),
        )
    exponent_value = _evaluate(node.right, env)
    if np.any(raw <= 0):
        raise DomainFaultError(pretty(node), "a variable exponent needs a positive base")
    value = np.power(raw, _raw(exponent_value))
    if not isinstance(base, DiffValue) and not isinstance(exponent_value, DiffValue):
        return value
    logarithm = base.chain(np.log(raw), 1.0 / raw, -1.0 / (raw * raw)) if isinstance(base, DiffValue) else np.log(raw)
    product = exponent_value * logarithm
    composed = product.chain(value, value, value) if isinstance(product, DiffValue) else DiffValue(value)
    return composed


def _binary(node: Binary, env: Mapping[str, Value]) -> Value:
    if node.op == "^":
        return _power(node, env)
    left = _evaluate(node.left, env)
    right = _evaluate(node.right, env)
    match node.op:
        case "+":
            return left + right
        case "-":
            return left - right
        case "*":
            return left * right
        case "/":
            if np.any(_raw(right) == 0):
                raise DomainFaultError(pretty(node), "division by zero")
            return left / right
    raise DomainFaultError(pretty(node), f"unknown operator '{node.op}'")


def _evaluate(node: Node, env: Mapping[str, Value]) -> Value:
    match node:
        case Number(value):
            return value
        case Constant(name):
            return _CONSTANTS[name]
        case Variable(name):
            return env[name]
        case Unary(op, operand):
            value = _evaluate(operand, env)
            return -value if op == "-" else value
        case Binary():
            result = _binary(node, env)
        case Call():
            result = _call(node, _evaluate(node.argument, env))
        case _:
            raise TypeError(f"Unknown expression node {node!r}")
    if not np.all(np.isfinite(_raw(result))):
        raise DomainFaultError(pretty(node), "non-finite result")
    return result


def _environment(expression: Expression, bindings: Mapping[str, Value]) -> dict[str, Value]:
    env: dict[str, Value] = {}
    for name in expression.variables:
        if name not in bindings:
            raise UnboundVariableError(name, str(expression))
        env[name] = bindings[name]
    return env


def evaluate(expression: Expression, bindings: Mapping[str, Scalar]) -> Scalar:
    """Evaluate an expression for plain (scalar or array) bindings."""
    value = _evaluate(expression.root, _environment(expression, bindings))
    return _raw(value)


def eval_with_partials(expression: Expression, bindings: Mapping[str, Value]) -> DiffValue:
    """Evaluate an expression with first and second partials in every declared variable.

    Plain bindings are seeded as independent variables; bindings that already are dual values are
    used as they are, which composes an expression with an outer chain of dependencies.
    """
    env = _environment(expression, bindings)
    seeded = {
        name: value if isinstance(value, DiffValue) else DiffValue.variable(name, value) for name, value in env.items()
    }
    result = _evaluate(expression.root, seeded)
    if not isinstance(result, DiffValue):
        result = DiffValue.constant(result)
    if not result.is_finite():
        raise DomainFaultError(str(expression), "non-finite partial derivative")
    return result
