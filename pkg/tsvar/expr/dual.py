"""Second-order forward-mode dual numbers over numpy arrays."""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field

import numpy as np

Scalar = float | np.ndarray


def pair(a: str, b: str) -> tuple[str, str]:
    """Get the canonical key of an unordered variable pair."""
    return (a, b) if a <= b else (b, a)


@dataclass(frozen=True)
class DiffValue:
    """A value with its first partials and its symmetric map of second partials.

    The second map holds one entry per unordered variable pair, so mixed partials agree exactly.
    """

    # numpy defers to the reflected operators instead of broadcasting over the object
    __array_ufunc__ = None

    value: Scalar
    first: Mapping[str, Scalar] = field(default_factory=dict)
    second: Mapping[tuple[str, str], Scalar] = field(default_factory=dict)

    @classmethod
    def variable(cls, name: str, value: Scalar) -> DiffValue:
        """Seed an independent variable."""
        seed: Scalar = np.ones_like(value, dtype=float) if isinstance(value, np.ndarray) else 1.0
        return cls(value, {name: seed}, {})

    @classmethod
    def constant(cls, value: Scalar) -> DiffValue:
        """Wrap a value without partials."""
        return cls(value)

    def d(self, name: str) -> Scalar:
        """Get the first partial with respect to a variable."""
        return self.first.get(name, 0.0)

    def d2(self, a: str, b: str) -> Scalar:
        """Get the second partial with respect to two variables."""
        return self.second.get(pair(a, b), 0.0)

    def is_finite(self) -> bool:
        """Check that the value and all partials are finite."""
        entries = [self.value, *self.first.values(), *self.second.values()]
        return all(bool(np.all(np.isfinite(entry))) for entry in entries)

    def chain(self, value: Scalar, slope: Scalar, curvature: Scalar) -> DiffValue:
        """Apply a scalar function with the given value, first and second derivative."""
        first = {name: slope * partial for name, partial in self.first.items()}
        names = sorted(self.first)
        second: dict[tuple[str, str], Scalar] = {}
        for index, a in enumerate(names):
            for b in names[index:]:
                second[(a, b)] = curvature * self.first[a] * self.first[b]
        for key, partial in self.second.items():
            second[key] = second.get(key, 0.0) + slope * partial
        return DiffValue(value, first, second)

    def __add__(self, other: DiffValue | Scalar) -> DiffValue:
        """Add two dual values."""
        other = _lift(other)
        return DiffValue(
            self.value + other.value,
            _merge(self.first, other.first, 1.0),
            _merge(self.second, other.second, 1.0),
        )

    def __radd__(self, other: Scalar) -> DiffValue:
        """Add a plain value."""
        return _lift(other) + self

    def __sub__(self, other: DiffValue | Scalar) -> DiffValue:
        """Subtract two dual values."""
        other = _lift(other)
        return DiffValue(
            self.value - other.value,
            _merge(self.first, other.first, -1.0),
            _merge(self.second, other.second, -1.0),
        )

    def __rsub__(self, other: Scalar) -> DiffValue:
        """Subtract from a plain value."""
        return _lift(other) - self

    def __neg__(self) -> DiffValue:
        """Negate."""
        return DiffValue(
            -self.value,
            {name: -partial for name, partial in self.first.items()},
            {key: -partial for key, partial in self.second.items()},
        )

    def __mul__(self, other: DiffValue | Scalar) -> DiffValue:
        """Multiply two dual values."""
        other = _lift(other)
        a, b = self, other
        names = set(a.first) | set(b.first)
        first = {name: a.d(name) * b.value + a.value * b.d(name) for name in names}
        ordered = sorted(names)
        second: dict[tuple[str, str], Scalar] = {}
        for index, i in enumerate(ordered):
            for j in ordered[index:]:
                second[(i, j)] = a.d2(i, j) * b.value + a.value * b.d2(i, j) + a.d(i) * b.d(j) + a.d(j) * b.d(i)
        return DiffValue(a.value * b.value, first, second)

    def __rmul__(self, other: Scalar) -> DiffValue:
        """Multiply by a plain value."""
        return _lift(other) * self

    def __truediv__(self, other: DiffValue | Scalar) -> DiffValue:
        """Divide two dual values."""
        other = _lift(other)
        a, b = self, other
        quotient = a.value / b.value
        names = set(a.first) | set(b.first)
        first = {name: (a.d(name) - quotient * b.d(name)) / b.value for name in names}
        ordered = sorted(names)
        second: dict[tuple[str, str], Scalar] = {}
        for index, i in enumerate(ordered):
            for j in ordered[index:]:
                numerator = a.d2(i, j) - first[i] * b.d(j) - first[j] * b.d(i) - quotient * b.d2(i, j)
                second[(i, j)] = numerator / b.value
        return DiffValue(quotient, first, second)

    def __rtruediv__(self, other: Scalar) -> DiffValue:
        """Divide a plain value."""
        return _lift(other) / self


def _lift(value: DiffValue | Scalar) -> DiffValue:
    if isinstance(value, DiffValue):
        return value
    return DiffValue.constant(value)


def _merge(left: Mapping, right: Mapping, sign: float) -> dict:
    merged = dict(left)
    for key, partial in right.items():
        merged[key] = merged[key] + sign * partial if key in merged else sign * partial
    return merged
