"""Delta and nabla calculus of grid functions on finite time scales."""

from __future__ import annotations

import logging
import operator
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from .. import TsvarError
from ..constants import ROOT_LOGGER_NAME
from .scale import ScaleKind, TimeScale

LOGGER = logging.getLogger(ROOT_LOGGER_NAME)


class DomainMismatchError(TsvarError):
    """A grid function is not defined where an operation needs it."""

    def __init__(self, message: str) -> None:
        """Create a DomainMismatchError instance."""
        super().__init__(message)


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Real values attached to the scale points with indices in [lo, hi)."""

    scale: TimeScale
    values: np.ndarray
    lo: int = 0
    hi: int = field(default=-1)

    def __post_init__(self) -> None:
        """Normalize the domain and freeze the values."""
        values = np.array(self.values, dtype=float)
        hi = self.lo + values.size if self.hi < 0 else self.hi
        if values.ndim != 1 or values.size != hi - self.lo:
            raise DomainMismatchError(
                f"{values.size} values do not fit the domain [{self.lo}, {hi}) of {self.scale.provenance}"
            )
        if self.lo < 0 or hi > self.scale.size or hi <= self.lo:
            raise DomainMismatchError(f"domain [{self.lo}, {hi}) is not inside {self.scale.provenance}")
        if not np.all(np.isfinite(values)):
            raise DomainMismatchError("grid function values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def from_callable(cls, scale: TimeScale, function: Callable[[np.ndarray], np.ndarray]) -> GridFunction:
        """Sample a vectorized function at all scale points."""
        values = np.broadcast_to(np.asarray(function(scale.points), dtype=float), scale.points.shape)
        return cls(scale, values)

    @classmethod
    def constant(cls, scale: TimeScale, value: float, lo: int = 0, hi: int | None = None) -> GridFunction:
        """Create a constant grid function."""
        hi = scale.size if hi is None else hi
        return cls(scale, np.full(hi - lo, float(value)), lo, hi)

    @property
    def domain(self) -> tuple[int, int]:
        """Index domain [lo, hi)."""
        return self.lo, self.hi

    @property
    def points(self) -> np.ndarray:
        """The scale points of the domain."""
        return self.scale.points[self.lo : self.hi]

    @property
    def mu(self) -> np.ndarray:
        """Forward graininess on the domain."""
        return self.scale.mu[self.lo : self.hi]

    @property
    def nu(self) -> np.ndarray:
        """Backward graininess on the domain."""
        return self.scale.nu[self.lo : self.hi]

    @property
    def is_full(self) -> bool:
        """Check whether the function is defined on the whole scale."""
        return self.lo == 0 and self.hi == self.scale.size

    def __len__(self) -> int:
        """Return the number of values."""
        return int(self.values.size)

    def at(self, t: float) -> float:
        """Get the value at the scale point t."""
        return self.at_index(self.scale.index_of(t))

    def at_index(self, index: int) -> float:
        """Get the value at a scale index."""
        if not self.lo <= index < self.hi:
            raise DomainMismatchError(f"index {index} is outside the domain [{self.lo}, {self.hi})")
        return float(self.values[index - self.lo])

    def restrict(self, lo: int, hi: int) -> GridFunction:
        """Restrict the function to the index domain [lo, hi)."""
        if lo < self.lo or hi > self.hi:
            raise DomainMismatchError(f"[{lo}, {hi}) is not inside the domain [{self.lo}, {self.hi})")
        return GridFunction(self.scale, self.values[lo - self.lo : hi - self.lo], lo, hi)

    def max_abs(self) -> float:
        """Get the maximum absolute value."""
        return float(np.max(np.abs(self.values)))

    def sigma_shift(self) -> GridFunction:
        """Get f^σ on the points whose forward jump lies in the domain."""
        if len(self) < 2 and self.lo == 0:
            raise DomainMismatchError("f^σ needs at least two values")
        start = max(self.lo - 1, 0)
        return GridFunction(self.scale, self.values[start + 1 - self.lo :], start, self.hi - 1)

    def rho_shift(self) -> GridFunction:
        """Get f^ρ on the points whose backward jump lies in the domain."""
        if len(self) < 2 and self.hi == self.scale.size:
            raise DomainMismatchError("f^ρ needs at least two values")
        stop = min(self.hi + 1, self.scale.size)
        return GridFunction(self.scale, self.values[: stop - 1 - self.lo], self.lo + 1, stop)

    def _combine(
        self, other: GridFunction | float, combine: Callable[[np.ndarray, np.ndarray], np.ndarray]
    ) -> GridFunction:
        if not isinstance(other, GridFunction):
            return GridFunction(self.scale, combine(self.values, np.asarray(float(other))), self.lo, self.hi)
        if other.scale is not self.scale and other.scale != self.scale:
            raise DomainMismatchError("grid functions live on different time scales")
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        if hi <= lo:
            raise DomainMismatchError("grid function domains do not overlap")
        left = self.values[lo - self.lo : hi - self.lo]
        right = other.values[lo - other.lo : hi - other.lo]
        return GridFunction(self.scale, combine(left, right), lo, hi)

    def __add__(self, other: GridFunction | float) -> GridFunction:
        """Add pointwise."""
        return self._combine(other, operator.add)

    def __radd__(self, other: float) -> GridFunction:
        """Add pointwise."""
        return self._combine(other, operator.add)

    def __sub__(self, other: GridFunction | float) -> GridFunction:
        """Subtract pointwise."""
        return self._combine(other, operator.sub)

    def __rsub__(self, other: float) -> GridFunction:
        """Subtract pointwise."""
        return self._combine(other, lambda left, right: right - left)

    def __mul__(self, other: GridFunction | float) -> GridFunction:
        """Multiply pointwise."""
        return self._combine(other, operator.mul)

    def __rmul__(self, other: float) -> GridFunction:
        """Multiply pointwise."""
        return self._combine(other, operator.mul)

    def __truediv__(self, other: GridFunction | float) -> GridFunction:
        """Divide pointwise."""
        return self._combine(other, operator.truediv)

    def __neg__(self) -> GridFunction:
        """Negate pointwise."""
        return GridFunction(self.scale, -self.values, self.lo, self.hi)


def delta_derivative(y: GridFunction) -> GridFunction:
    """Get y^Δ = (y^σ − y)/μ on the domain trimmed by its last point."""
    if len(y) < 2:
        raise DomainMismatchError("the delta derivative needs at least two points")
    mu = y.scale.mu[y.lo : y.hi - 1]
    return GridFunction(y.scale, np.diff(y.values) / mu, y.lo, y.hi - 1)


def nabla_derivative(y: GridFunction) -> GridFunction:
    """Get y^∇ = (y − y^ρ)/ν on the domain trimmed by its first point."""
    if len(y) < 2:
        raise DomainMismatchError("the nabla derivative needs at least two points")
    nu = y.scale.nu[y.lo + 1 : y.hi]
    return GridFunction(y.scale, np.diff(y.values) / nu, y.lo + 1, y.hi)


def _ordered_indices(f: GridFunction, a: float, b: float) -> tuple[int, int, float]:
    ia, ib = f.scale.index_of(a), f.scale.index_of(b)
    if ia <= ib:
        return ia, ib, 1.0
    return ib, ia, -1.0


def delta_integral(f: GridFunction, a: float, b: float) -> float:
    """Get ∫_a^b f Δt = Σ_{t∈[a,b)} μ(t) f(t), negated when a > b."""
    lo, hi, sign = _ordered_indices(f, a, b)
    if lo == hi:
        return 0.0
    if lo < f.lo or hi > f.hi:
        raise DomainMismatchError(f"f is not defined on [{a!r}, {b!r}) of {f.scale.provenance}")
    weights = f.scale.mu[lo:hi]
    return sign * float(np.sum(weights * f.values[lo - f.lo : hi - f.lo]))


def nabla_integral(f: GridFunction, a: float, b: float) -> float:
    """Get ∫_a^b f ∇t = Σ_{t∈(a,b]} ν(t) f(t), negated when a > b."""
    lo, hi, sign = _ordered_indices(f, a, b)
    if lo == hi:
        return 0.0
    if lo + 1 < f.lo or hi >= f.hi:
        raise DomainMismatchError(f"f is not defined on ({a!r}, {b!r}] of {f.scale.provenance}")
    weights = f.scale.nu[lo + 1 : hi + 1]
    return sign * float(np.sum(weights * f.values[lo + 1 - f.lo : hi + 1 - f.lo]))


def running_delta_integral(f: GridFunction, a: float | None = None) -> GridFunction:
    """Get t ↦ ∫_a^t f Δτ for all t from a up to the forward jump of the domain end."""
    start = f.lo if a is None else f.scale.index_of(a)
    if start < f.lo or start >= f.hi:
        raise DomainMismatchError(f"the lower limit is outside the domain of f on {f.scale.provenance}")
    terms = f.scale.mu[start : f.hi] * f.values[start - f.lo :]
    values = np.concatenate(([0.0], np.cumsum(terms)))
    stop = min(f.hi + 1, f.scale.size)
    return GridFunction(f.scale, values[: stop - start], start, stop)


def running_nabla_integral(f: GridFunction, a: float | None = None) -> GridFunction:
    """Get t ↦ ∫_a^t f ∇τ for all t from a up to the domain end."""
    start = max(f.lo - 1, 0) if a is None else f.scale.index_of(a)
    if start + 1 < f.lo or start >= f.hi:
        raise DomainMismatchError(f"the lower limit is outside the domain of f on {f.scale.provenance}")
    terms = f.scale.nu[start + 1 : f.hi] * f.values[start + 1 - f.lo :]
    values = np.concatenate(([0.0], np.cumsum(terms)))
    return GridFunction(f.scale, values, start, f.hi)


def delta_integral_against_derivative(f: GridFunction, eta: GridFunction) -> float:
    """Get ∫ f η^Δ Δt over the domain of f in the summation form Σ f(t)(η(σ(t)) − η(t))."""
    if f.lo < eta.lo or f.hi + 1 > eta.hi:
        raise DomainMismatchError("η must be defined on the domain of f and its forward jumps")
    increments = np.diff(eta.values[f.lo - eta.lo : f.hi + 1 - eta.lo])
    return float(np.sum(f.values * increments))


def ts_exponential(scale: TimeScale, r: GridFunction, s0: float) -> GridFunction:
    """Get e_r(t, s0) = Π_{τ∈[s0,t)} (1 + μ(τ)r(τ)) for every t ≥ s0 reachable from the domain of r."""
    if scale.kind != ScaleKind.EXACT_ISOLATED:
        raise DomainMismatchError(f"the exponential needs an exact isolated scale, got {scale.provenance}")
    start = scale.index_of(s0)
    if start < r.lo or start > r.hi:
        raise DomainMismatchError(f"r is not defined from {s0!r} on")
    factors = 1.0 + scale.mu[start : r.hi] * r.values[start - r.lo :]
    values = np.concatenate(([1.0], np.cumprod(factors)))
    stop = min(r.hi + 1, scale.size)
    return GridFunction(scale, values[: stop - start], start, stop)
