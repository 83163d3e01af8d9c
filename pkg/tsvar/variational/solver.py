"""Direct solution of discretized single-integrand problems."""

from __future__ import annotations

import logging

import numpy as np

from ..constants import NEWTON_GRADIENT_TOLERANCE, NEWTON_MAX_ITER, ROOT_LOGGER_NAME
from ..timescale import GridFunction, ScaleKind, TimeScale
from .functional import Flavor, discretize
from .newton import ConvergenceError, damped_newton
from .problem import InvalidProblemError, VariationalProblem, el_integral_residual, nabla_el_residual

LOGGER = logging.getLogger(ROOT_LOGGER_NAME)


def free_indices(size: int, y_a: float | None, y_b: float | None) -> np.ndarray:
    """Get the grid indices whose values are unknowns."""
    first = 0 if y_a is None else 1
    last = size if y_b is None else size - 1
    return np.arange(first, last)


def linear_interpolant(scale: TimeScale, y_a: float | None, y_b: float | None) -> GridFunction:
    """Interpolate the boundary data linearly; a missing value copies the other end (or 0)."""
    start = y_a if y_a is not None else (y_b or 0.0)
    end = y_b if y_b is not None else start
    ratio = (scale.points - scale.a) / (scale.b - scale.a)
    return GridFunction(scale, start + (end - start) * ratio)


def solve_direct(
    problem: VariationalProblem,
    init: GridFunction | None = None,
    *,
    max_iter: int = NEWTON_MAX_ITER,
    tolerance: float = NEWTON_GRADIENT_TOLERANCE,
) -> GridFunction:
    """Find a stationary trajectory of the discretized functional by damped Newton.

    Free endpoints are unknowns like the interior values, so natural boundary conditions are part
    of the stationarity system.
    """
    if problem.scale.kind != ScaleKind.EXACT_ISOLATED:
        raise InvalidProblemError(f"solve needs an exact isolated scale, got {problem.scale.provenance}")
    start = linear_interpolant(problem.scale, problem.y_a, problem.y_b) if init is None else init
    if start.scale != problem.scale or not start.is_full:
        raise InvalidProblemError("the initial trajectory must be defined on the problem scale")
    values = np.array(start.values)
    if problem.y_a is not None:
        values[0] = problem.y_a
    if problem.y_b is not None:
        values[-1] = problem.y_b
    unknown = free_indices(problem.scale.size, problem.y_a, problem.y_b)

    def system(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        trial = values.copy()
        trial[unknown] = x
        sampled = discretize(problem.lagrangian, problem.flavor, problem.scale, trial)
        return sampled.gradient()[unknown], sampled.hessian()[np.ix_(unknown, unknown)]

    result = damped_newton(system, values[unknown], max_iter=max_iter, tolerance=tolerance, singular="raise")
    if not result.converged:
        raise ConvergenceError(
            f"Newton did not converge for {problem.lagrangian.label} on {problem.scale.provenance}: "
            f"final gradient norm {result.residual_norm:.3e} after {result.iterations} iterations",
            [result.residual_norm],
        )
    values[unknown] = result.x
    solution = GridFunction(problem.scale, values)
    report = (
        el_integral_residual(problem, solution)
        if problem.flavor == Flavor.DELTA
        else nabla_el_residual(problem, solution)
    )
    if not report.is_extremal:
        raise ConvergenceError(
            f"stationary point fails the Euler-Lagrange check with residual {report.max_abs_residual:.3e}",
            [result.residual_norm],
        )
    LOGGER.info(
        "Solved %s on %s in %d iterations (gradient %.3e)",
        problem.lagrangian.label,
        problem.scale.provenance,
        result.iterations,
        result.residual_norm,
    )
    return solution
