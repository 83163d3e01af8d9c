"""Integrands L(t, y, v) that supply values and partials along a grid."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol, runtime_checkable

import numpy as np

from .dual import DiffValue
from .evaluate import eval_with_partials
from .nodes import Expression
from .parser import parse

INTEGRAND_VARIABLES = ("t", "y", "v")


@dataclass(frozen=True)
class SampledPartials:
    """Value and partials of an integrand at a batch of points."""

    value: np.ndarray
    y: np.ndarray
    v: np.ndarray
    yy: np.ndarray
    yv: np.ndarray
    vv: np.ndarray

    @classmethod
    def from_diff(cls, diff: DiffValue, shape: tuple[int, ...]) -> SampledPartials:
        """Broadcast a dual value in (y, v) to the batch shape."""

        def spread(entry: float | np.ndarray) -> np.ndarray:
            return np.array(np.broadcast_to(np.asarray(entry, dtype=float), shape))

        return cls(
            value=spread(diff.value),
            y=spread(diff.d("y")),
            v=spread(diff.d("v")),
            yy=spread(diff.d2("y", "y")),
            yv=spread(diff.d2("y", "v")),
            vv=spread(diff.d2("v", "v")),
        )


@runtime_checkable
class Integrand(Protocol):
    """Something that evaluates L and its partials in (y, v) at scale points t."""

    @property
    def label(self) -> str:
        """Short human readable description."""

    @property
    def has_second_partials(self) -> bool:
        """Whether the second partials are exact rather than unavailable."""

    def partials(self, t: np.ndarray, y: np.ndarray | DiffValue, v: np.ndarray | DiffValue) -> DiffValue:
        """Evaluate at arrays of points; dual inputs are composed through."""


class ExprIntegrand:
    """An integrand given by an expression over t, y and v."""

    def __init__(self, expression: Expression) -> None:
        """Create an ExprIntegrand instance."""
        self.expression = expression

    @classmethod
    def parse(cls, text: str) -> ExprIntegrand:
        """Parse the integrand text."""
        return cls(parse(text, INTEGRAND_VARIABLES))

    @property
    def label(self) -> str:
        """Get the expression text."""
        return str(self.expression)

    @property
    def has_second_partials(self) -> bool:
        """Expressions always have exact second partials."""
        return True

    def partials(self, t: np.ndarray, y: np.ndarray | DiffValue, v: np.ndarray | DiffValue) -> DiffValue:
        """Evaluate with partials in y and v."""
        bindings = {
            "t": DiffValue.constant(t),
            "y": y if isinstance(y, DiffValue) else DiffValue.variable("y", y),
            "v": v if isinstance(v, DiffValue) else DiffValue.variable("v", v),
        }
        return eval_with_partials(self.expression, bindings)


class PartialIntegrand:
    """The integrand sign·∂L/∂wrt built from another integrand; its own partials are first order only."""

    def __init__(self, base: Integrand, wrt: str, sign: float = 1.0) -> None:
        """Create a PartialIntegrand instance."""
        if wrt not in ("y", "v"):
            raise ValueError(f"partials are taken with respect to y or v, not {wrt}")
        self.base = base
        self.wrt = wrt
        self.sign = sign

    @property
    def label(self) -> str:
        """Describe the derived integrand."""
        prefix = "-" if self.sign < 0 else ""
        return f"{prefix}d({self.base.label})/d{self.wrt}"

    @property
    def has_second_partials(self) -> bool:
        """Second partials would need third derivatives of the base."""
        return False

    def partials(self, t: np.ndarray, y: np.ndarray | DiffValue, v: np.ndarray | DiffValue) -> DiffValue:
        """Evaluate the partial of the base with its first partials."""
        if isinstance(y, DiffValue) or isinstance(v, DiffValue):
            raise TypeError("a partial integrand cannot be composed with dual inputs")
        base = self.base.partials(t, y, v)
        return DiffValue(
            self.sign * base.d(self.wrt),
            {"y": self.sign * base.d2(self.wrt, "y"), "v": self.sign * base.d2(self.wrt, "v")},
            {},
        )


def as_integrand(value: Integrand | Expression | str) -> Integrand:
    """Coerce an expression or its text to an integrand."""
    if isinstance(value, str):
        return ExprIntegrand.parse(value)
    if isinstance(value, Expression):
        return ExprIntegrand(value)
    return value


def sample(integrand: Integrand, t: np.ndarray, y: np.ndarray, v: np.ndarray) -> SampledPartials:
    """Evaluate an integrand at a batch of points."""
    return SampledPartials.from_diff(integrand.partials(t, y, v), np.shape(t))
