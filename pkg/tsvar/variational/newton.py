"""Damped Newton iteration for square nonlinear systems."""

from __future__ import annotations

import logging
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from .. import TsvarError
from ..constants import NEWTON_GRADIENT_TOLERANCE, NEWTON_MAX_HALVINGS, NEWTON_MAX_ITER, ROOT_LOGGER_NAME
from ..expr import DomainFaultError

LOGGER = logging.getLogger(ROOT_LOGGER_NAME)

System = Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]

# Residual level accepted when the iteration stalls at rounding level.
STALL_TOLERANCE = 1e-9
_SUFFICIENT_DECREASE = 1e-4
_MAX_LEVENBERG_TRIES = 12


class ConvergenceError(TsvarError):
    """The Newton iteration did not reach the requested residual."""

    def __init__(self, message: str, gradient_norms: list[float] | None = None) -> None:
        """Create a ConvergenceError instance."""
        self.gradient_norms = gradient_norms or []
        super().__init__(message)


class SingularHessianError(TsvarError):
    """The Jacobian of the stationarity system is singular."""

    def __init__(self, size: int, rank: int) -> None:
        """Create a SingularHessianError instance."""
        super().__init__(f"The Hessian is singular (rank {rank} of {size}): the problem is degenerate")


@dataclass(frozen=True)
class NewtonResult:
    """Outcome of a Newton run."""

    x: np.ndarray
    converged: bool
    iterations: int
    residual_norm: float


def _norm(residual: np.ndarray) -> float:
    return float(np.max(np.abs(residual))) if residual.size else 0.0


def _evaluate(system: System, x: np.ndarray) -> tuple[np.ndarray, np.ndarray] | None:
    try:
        residual, jacobian = system(x)
    except DomainFaultError:
        return None
    if not (np.all(np.isfinite(residual)) and np.all(np.isfinite(jacobian))):
        return None
    return residual, jacobian


def _newton_step(jacobian: np.ndarray, residual: np.ndarray, singular: str) -> np.ndarray:
    try:
        step = np.linalg.solve(jacobian, -residual)
    except np.linalg.LinAlgError:
        step = None
    if step is None or not np.all(np.isfinite(step)):
        if singular == "raise":
            raise SingularHessianError(jacobian.shape[0], int(np.linalg.matrix_rank(jacobian)))
        step = np.linalg.lstsq(jacobian, -residual, rcond=None)[0]
    return step


def damped_newton(
    system: System,
    x0: np.ndarray,
    *,
    max_iter: int = NEWTON_MAX_ITER,
    tolerance: float = NEWTON_GRADIENT_TOLERANCE,
    singular: str = "raise",
) -> NewtonResult:
    """Solve system(x) = 0 where system returns the residual and its Jacobian.

    Steps are halved until the residual norm decreases; when halving fails a Levenberg-Marquardt step
    on the squared residual is tried. ``singular`` is "raise" or "lstsq" for singular Jacobians.
    """
    x = np.array(x0, dtype=float)
    evaluated = _evaluate(system, x)
    if evaluated is None:
        return NewtonResult(x, False, 0, float("inf"))
    residual, jacobian = evaluated
    norm = _norm(residual)
    for iteration in range(max_iter):
        if norm <= tolerance:
            return NewtonResult(x, True, iteration, norm)
        step = _newton_step(jacobian, residual, singular)
        accepted = None
        alpha = 1.0
        for _ in range(NEWTON_MAX_HALVINGS):
            candidate = x + alpha * step
            trial = _evaluate(system, candidate)
            if trial is not None and _norm(trial[0]) <= (1.0 - _SUFFICIENT_DECREASE * alpha) * norm:
                accepted = candidate, trial
                break
            alpha *= 0.5
        if accepted is None:
            accepted = _levenberg_step(system, x, residual, jacobian, norm)
        if accepted is None:
            converged = norm <= STALL_TOLERANCE
            LOGGER.debug("Newton stopped after %d iterations with residual %.3e", iteration, norm)
            return NewtonResult(x, converged, iteration, norm)
        x, (residual, jacobian) = accepted
        norm = _norm(residual)
        LOGGER.debug("Newton iteration %d: residual %.3e, step length %.3g", iteration + 1, norm, alpha)
    return NewtonResult(x, norm <= tolerance, max_iter, norm)


def _levenberg_step(
    system: System, x: np.ndarray, residual: np.ndarray, jacobian: np.ndarray, norm: float
) -> tuple[np.ndarray, tuple[np.ndarray, np.ndarray]] | None:
    normal = jacobian.T @ jacobian
    rhs = -jacobian.T @ residual
    damping = 1e-6 * max(1.0, float(np.max(np.abs(np.diag(normal))))) if normal.size else 1e-6
    for _ in range(_MAX_LEVENBERG_TRIES):
        try:
            step = np.linalg.solve(normal + damping * np.eye(normal.shape[0]), rhs)
        except np.linalg.LinAlgError:
            damping *= 10.0
            continue
        candidate = x + step
        trial = _evaluate(system, candidate)
        if trial is not None and _norm(trial[0]) < norm:
            return candidate, trial
        damping *= 10.0
    return None
