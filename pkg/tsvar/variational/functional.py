"""Discretized delta and nabla functionals: value, gradient and Hessian in the grid values."""

from __future__ import annotations

from dataclasses import dataclass
from enum import StrEnum

import numpy as np

from ..expr import Integrand, SampledPartials, sample
from ..timescale import TimeScale


class Flavor(StrEnum):
    """Which calculus an integral uses."""

    DELTA = "delta"
    NABLA = "nabla"


@dataclass(frozen=True)
class Discretization:
    """An integrand sampled along a trajectory.

    For DELTA the samples sit on T^κ (indices 0..n-2) at (t, y^σ, y^Δ) with weights μ; for NABLA they
    sit on T_κ (indices 1..n-1) at (t, y^ρ, y^∇) with weights ν.
    """

    flavor: Flavor
    scale: TimeScale
    indices: np.ndarray
    weights: np.ndarray
    shifted: np.ndarray
    slope: np.ndarray
    partials: SampledPartials

    @property
    def t(self) -> np.ndarray:
        """Sample points."""
        return self.scale.points[self.indices]

    @property
    def value(self) -> float:
        """The integral of the integrand along the trajectory."""
        return float(np.sum(self.weights * self.partials.value))

    def gradient(self) -> np.ndarray:
        """Gradient of the integral with respect to every grid value."""
        p, w = self.partials, self.weights
        gradient = np.zeros(self.scale.size)
        if self.flavor == Flavor.DELTA:
            gradient[1:] += w * p.y + p.v
            gradient[:-1] -= p.v
        else:
            gradient[:-1] += w * p.y - p.v
            gradient[1:] += p.v
        return gradient

    def hessian(self) -> np.ndarray:
        """Hessian of the integral with respect to every grid value (tridiagonal)."""
        p, w = self.partials, self.weights
        size = self.scale.size
        hessian = np.zeros((size, size))
        left = np.arange(size - 1)
        right = left + 1
        if self.flavor == Flavor.DELTA:
            np.add.at(hessian, (right, right), w * p.yy + 2.0 * p.yv + p.vv / w)
            np.add.at(hessian, (left, left), p.vv / w)
            cross = -p.yv - p.vv / w
        else:
            np.add.at(hessian, (left, left), w * p.yy - 2.0 * p.yv + p.vv / w)
            np.add.at(hessian, (right, right), p.vv / w)
            cross = p.yv - p.vv / w
        np.add.at(hessian, (left, right), cross)
        np.add.at(hessian, (right, left), cross)
        return hessian


def discretize(integrand: Integrand, flavor: Flavor, scale: TimeScale, values: np.ndarray) -> Discretization:
    """Sample an integrand along the grid values of a trajectory."""
    values = np.asarray(values, dtype=float)
    if flavor == Flavor.DELTA:
        indices = np.arange(scale.size - 1)
        weights = scale.mu[:-1]
        shifted = values[1:]
    else:
        indices = np.arange(1, scale.size)
        weights = scale.nu[1:]
        shifted = values[:-1]
    slope = np.diff(values) / weights
    t = scale.points[indices]
    return Discretization(flavor, scale, indices, weights, shifted, slope, sample(integrand, t, shifted, slope))
