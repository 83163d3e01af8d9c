"""Single-integrand variational problems: functional value, Euler-Lagrange residuals and the Legendre quantity."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .. import TsvarError
from ..constants import DENSE_EL_TOLERANCE, EL_TOLERANCE, ROOT_LOGGER_NAME
from ..expr import Expression, Integrand, as_integrand
from ..timescale import (
    GridFunction,
    ScaleKind,
    TimeScale,
    delta_derivative,
    delta_integral_against_derivative,
    nabla_derivative,
)
from .functional import Discretization, Flavor, discretize

LOGGER = logging.getLogger(ROOT_LOGGER_NAME)

BOUNDARY_TOLERANCE = 1e-10


class InvalidProblemError(TsvarError):
    """The problem definition violates its invariants."""


class BoundaryViolationError(TsvarError):
    """A trajectory does not meet the prescribed boundary value."""

    def __init__(self, end: str, expected: float, actual: float) -> None:
        """Create a BoundaryViolationError instance."""
        super().__init__(f"Boundary condition y({end}) = {expected!r} violated, trajectory has {actual!r}")


def dagger(values: np.ndarray) -> np.ndarray:
    """Pseudo reciprocal: 1/x for x ≠ 0 and 0 for x = 0."""
    result = np.zeros_like(values, dtype=float)
    nonzero = values != 0
    result[nonzero] = 1.0 / values[nonzero]
    return result


def default_tolerance(scale: TimeScale) -> float:
    """Constancy tolerance for EL residuals on a scale."""
    return DENSE_EL_TOLERANCE if scale.kind == ScaleKind.SAMPLED_DENSE else EL_TOLERANCE


@dataclass(frozen=True)
class VariationalProblem:
    """Extremize ∫ L(t, y^σ, y^Δ) Δt (DELTA) or ∫ L(t, y^ρ, y^∇) ∇t (NABLA) over [a, b]."""

    scale: TimeScale
    lagrangian: Integrand
    flavor: Flavor = Flavor.DELTA
    y_a: float | None = None
    y_b: float | None = None

    def __post_init__(self) -> None:
        """Validate the problem."""
        if self.scale.size < 3:
            raise InvalidProblemError(f"A variational problem needs at least three points, {self.scale.provenance}")
        for name, value in (("y_a", self.y_a), ("y_b", self.y_b)):
            if value is not None and not np.isfinite(value):
                raise InvalidProblemError(f"Boundary value {name} must be finite")
        object.__setattr__(self, "lagrangian", as_integrand(self.lagrangian))
        object.__setattr__(self, "flavor", Flavor(self.flavor))

    @classmethod
    def create(
        cls,
        scale: TimeScale,
        lagrangian: Integrand | Expression | str,
        flavor: Flavor | str = Flavor.DELTA,
        y_a: float | None = None,
        y_b: float | None = None,
    ) -> VariationalProblem:
        """Create a problem from an expression or its text."""
        return cls(scale, as_integrand(lagrangian), Flavor(flavor), y_a, y_b)

    def trajectory(self, values: np.ndarray | list[float]) -> GridFunction:
        """Wrap grid values as a trajectory on the problem scale."""
        return GridFunction(self.scale, np.asarray(values, dtype=float))


@dataclass(frozen=True)
class ELReport:
    """Euler-Lagrange residual of a trajectory with the Legendre quantity (delta problems)."""

    residual: GridFunction
    constant_c: float
    max_abs_residual: float
    legendre: GridFunction | None
    legendre_strict: bool
    tolerance: float
    domain: str

    @property
    def is_extremal(self) -> bool:
        """Check the residual against the constancy tolerance."""
        return self.max_abs_residual <= self.tolerance * (1.0 + abs(self.constant_c))


def check_boundary(scale: TimeScale, y_a: float | None, y_b: float | None, y: GridFunction) -> None:
    """Check that y lives on the scale and meets the boundary values that are given."""
    if not y.is_full or y.scale != scale:
        raise InvalidProblemError("the trajectory must be defined on every point of the problem scale")
    for end, expected, actual in (("a", y_a, y.values[0]), ("b", y_b, y.values[-1])):
        if expected is not None and abs(actual - expected) > BOUNDARY_TOLERANCE * max(1.0, abs(expected)):
            raise BoundaryViolationError(end, expected, float(actual))


def _discretize(problem: VariationalProblem, y: GridFunction) -> Discretization:
    check_boundary(problem.scale, problem.y_a, problem.y_b, y)
    return discretize(problem.lagrangian, problem.flavor, problem.scale, y.values)


def evaluate_functional(problem: VariationalProblem, y: GridFunction) -> float:
    """Get the delta (or nabla) integral of L along y over [a, b]."""
    return _discretize(problem, y).value


def functional_gradient(problem: VariationalProblem, y: GridFunction) -> GridFunction:
    """Get the gradient of the discretized functional with respect to every grid value.

    Interior components are the directional derivatives along the hat basis.
    """
    return GridFunction(problem.scale, _discretize(problem, y).gradient())


def _centered(values: np.ndarray) -> tuple[np.ndarray, float]:
    constant = float(np.mean(values))
    return values - constant, constant


def _report(
    problem: VariationalProblem,
    g: GridFunction,
    legendre: GridFunction | None,
    tolerance: float | None,
    domain: str,
) -> ELReport:
    residual, constant = _centered(g.values)
    report = ELReport(
        residual=GridFunction(problem.scale, residual, g.lo, g.hi),
        constant_c=constant,
        max_abs_residual=float(np.max(np.abs(residual))),
        legendre=legendre,
        legendre_strict=bool(legendre is not None and np.all(legendre.values > 0)),
        tolerance=default_tolerance(problem.scale) if tolerance is None else tolerance,
        domain=domain,
    )
    LOGGER.debug(
        "EL residual of %s on %s: max %.3e around c=%.6g",
        problem.lagrangian.label,
        problem.scale.provenance,
        report.max_abs_residual,
        constant,
    )
    return report


def el_integral_residual(problem: VariationalProblem, y: GridFunction, tolerance: float | None = None) -> ELReport:
    """Get g(t) = L_v(t) − ∫_a^t L_y Δτ on [a,b]^κ, its mean c and the deviation from constancy."""
    if problem.flavor != Flavor.DELTA:
        raise InvalidProblemError("the delta integral form needs a DELTA problem")
    sampled = _discretize(problem, y)
    accumulated = np.concatenate(([0.0], np.cumsum(sampled.weights * sampled.partials.y)[:-1]))
    g = GridFunction(problem.scale, sampled.partials.v - accumulated, 0, problem.scale.size - 1)
    return _report(problem, g, _legendre(problem, sampled), tolerance, "T^kappa")


def nabla_el_residual(problem: VariationalProblem, y: GridFunction, tolerance: float | None = None) -> ELReport:
    """Get g(t) = L_v(t) − ∫_a^t L_y ∇τ on [a,b]_κ, its mean c and the deviation from constancy."""
    if problem.flavor != Flavor.NABLA:
        raise InvalidProblemError("the nabla integral form needs a NABLA problem")
    sampled = _discretize(problem, y)
    accumulated = np.cumsum(sampled.weights * sampled.partials.y)
    g = GridFunction(problem.scale, sampled.partials.v - accumulated, 1, problem.scale.size)
    return _report(problem, g, None, tolerance, "T_kappa")


def _legendre(problem: VariationalProblem, sampled: Discretization) -> GridFunction:
    a, b, c = sampled.partials.vv, sampled.partials.yy, sampled.partials.yv
    mu = problem.scale.mu
    size = problem.scale.size
    mu_here = mu[: size - 2]
    quantity = a[:-1] + mu_here * (2.0 * c[:-1] + mu_here * b[:-1] + dagger(mu[1 : size - 1]) * a[1:])
    return GridFunction(problem.scale, quantity, 0, size - 2)


def legendre_quantity(problem: VariationalProblem, y: GridFunction) -> GridFunction:
    """Get A + μ(2C + μB + (μ^σ)†A^σ) on [a,b]^{κ²} with A = L_vv, B = L_yy, C = L_yv."""
    if problem.flavor != Flavor.DELTA:
        raise InvalidProblemError("the Legendre quantity is defined for DELTA problems")
    return _legendre(problem, _discretize(problem, y))


def el_differential_residual(problem: VariationalProblem, y: GridFunction) -> GridFunction:
    """Get the differential form L_v^Δ − L_y (DELTA) or L_v^∇ − L_y (NABLA) of the Euler-Lagrange equation."""
    sampled = _discretize(problem, y)
    lo, hi = int(sampled.indices[0]), int(sampled.indices[-1]) + 1
    momentum = GridFunction(problem.scale, sampled.partials.v, lo, hi)
    force = GridFunction(problem.scale, sampled.partials.y, lo, hi)
    if problem.flavor == Flavor.DELTA:
        return delta_derivative(momentum) - force
    return nabla_derivative(momentum) - force


def hat_function(scale: TimeScale, index: int) -> GridFunction:
    """The hat basis function that is 1 at an interior index and 0 elsewhere."""
    if not 0 < index < scale.size - 1:
        raise InvalidProblemError(f"hat functions sit on interior points, got index {index}")
    values = np.zeros(scale.size)
    values[index] = 1.0
    return GridFunction(scale, values)


def dubois_reymond_probe(f: GridFunction) -> np.ndarray:
    """Get ∫_a^b f η_j^Δ Δt for every interior hat function η_j; f lives on [a,b]^κ."""
    scale = f.scale
    if f.domain != (0, scale.size - 1):
        raise InvalidProblemError("the probe needs f on [a,b]^kappa")
    return np.array(
        [delta_integral_against_derivative(f, hat_function(scale, index)) for index in range(1, scale.size - 1)]
    )
