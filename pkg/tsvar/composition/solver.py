"""Multi-start stationarity solver for composition problems, with a multiplier for the isoperimetric case."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from .. import TsvarError
from ..constants import (
    CONSTRAINT_TOLERANCE,
    DEFAULT_MULTISTART,
    EL_TOLERANCE,
    NEWTON_GRADIENT_TOLERANCE,
    NEWTON_MAX_ITER,
    ROOT_LOGGER_NAME,
    START_ESCAPE_FACTOR,
    TIE_TOLERANCE,
)
from ..timescale import GridFunction, ScaleKind
from ..variational import InvalidProblemError, NewtonResult, damped_newton, free_indices, linear_interpolant
from ..variational.newton import System
from .conditions import classify_extremal, el_forms_of, iso_residuals, transversality_residuals
from .problem import CompositionProblem, Normality, Objective, evaluate_composition, evaluate_family

LOGGER = logging.getLogger(ROOT_LOGGER_NAME)


class NoConvergentStartError(TsvarError):
    """None of the initializations reached a stationary point."""

    def __init__(self, norms: list[float]) -> None:
        """Create a NoConvergentStartError instance."""
        self.norms = norms
        listing = ", ".join(f"start {index}: {norm:.3e}" for index, norm in enumerate(norms))
        super().__init__(f"No start converged to a stationary point (final gradient norms {listing})")


@dataclass(frozen=True)
class SolveOptions:
    """Solver settings."""

    objective: Objective = Objective.MIN
    multistart: int = DEFAULT_MULTISTART
    max_iter: int = NEWTON_MAX_ITER
    tolerance: float = NEWTON_GRADIENT_TOLERANCE
    el_tolerance: float = EL_TOLERANCE


@dataclass(frozen=True)
class Extremal:
    """A stationary trajectory with its multiplier, value and condition residuals."""

    y: GridFunction
    lam: float | None
    value: float
    F: np.ndarray
    residual_summary: dict[str, float] = field(default_factory=dict)
    normality: Normality | None = None
    start: int = 0
    iterations: int = 0


def start_multipliers(count: int) -> list[float]:
    """Get the perturbation multipliers 0, 1, −1, 2, −2, 4, −4, ... of the starts."""
    multipliers = [0.0]
    magnitude = 1.0
    while len(multipliers) < count:
        multipliers.append(magnitude)
        if len(multipliers) < count:
            multipliers.append(-magnitude)
        magnitude *= 2.0
    return multipliers[:count]


def _amplitude(problem: CompositionProblem) -> float:
    ends = [abs(value) for value in (problem.y_a, problem.y_b) if value is not None]
    spread = abs(problem.y_b - problem.y_a) if problem.y_a is not None and problem.y_b is not None else 0.0
    return max([1.0, spread, *ends])


def initial_guesses(problem: CompositionProblem, count: int) -> list[np.ndarray]:
    """Linear interpolant of the boundary data plus scaled bump (and ramp, for free ends) profiles."""
    scale = problem.scale
    base = linear_interpolant(scale, problem.y_a, problem.y_b).values
    s = (scale.points - scale.a) / (scale.b - scale.a)
    profile = np.sin(np.pi * s)
    if problem.y_a is None:
        profile = profile + (1.0 - s)
    if problem.y_b is None:
        profile = profile + s
    amplitude = _amplitude(problem)
    return [base + 0.5 * multiplier * amplitude * profile for multiplier in start_multipliers(count)]


def _plain_system(problem: CompositionProblem, values: np.ndarray, unknown: np.ndarray) -> System:
    names = problem.family.names

    def system(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        trial = values.copy()
        trial[unknown] = x
        evaluation = evaluate_family(problem.family, problem.scale, trial)
        return evaluation.gradient()[unknown], evaluation.hessian(names)[np.ix_(unknown, unknown)]

    return system


def _iso_system(problem: CompositionProblem, values: np.ndarray, unknown: np.ndarray) -> System:
    assert problem.iso is not None
    constraint = problem.iso
    names, constraint_names = problem.family.names, constraint.family.names

    def system(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        trial = values.copy()
        trial[unknown] = x[:-1]
        lam = x[-1]
        main = evaluate_family(problem.family, problem.scale, trial)
        side = evaluate_family(constraint.family, problem.scale, trial)
        gradient = side.gradient()[unknown]
        residual = np.concatenate((main.gradient()[unknown] - lam * gradient, [side.value - constraint.target]))
        block = main.hessian(names) - lam * side.hessian(constraint_names)
        size = unknown.size
        jacobian = np.zeros((size + 1, size + 1))
        jacobian[:size, :size] = block[np.ix_(unknown, unknown)]
        jacobian[:size, size] = -gradient
        jacobian[size, :size] = gradient
        return residual, jacobian

    return system


def _initial_multiplier(problem: CompositionProblem, values: np.ndarray, unknown: np.ndarray) -> float:
    assert problem.iso is not None
    main = evaluate_family(problem.family, problem.scale, values).gradient()[unknown]
    side = evaluate_family(problem.iso.family, problem.scale, values).gradient()[unknown]
    norm = float(side @ side)
    return float(side @ main) / norm if norm > 0 else 0.0


def _summarize(
    problem: CompositionProblem, y: GridFunction, lam: float | None, options: SolveOptions
) -> dict[str, float] | None:
    """Residual summary of a converged start, None when it fails the optimality checks."""
    _, state = evaluate_composition(problem, y)
    summary: dict[str, float] = {}
    if problem.iso is None:
        forms = el_forms_of(state)
        summary["el_nabla"] = forms.nabla_form.max_abs()
        summary["el_delta"] = forms.delta_form.max_abs()
        passed = forms.holds(options.el_tolerance)
    else:
        assert lam is not None
        iso = iso_residuals(problem, y, lam)
        for index, deviation in enumerate(iso.max_abs, start=1):
            summary[f"iso_{index}"] = deviation
        summary["constraint"] = iso.constraint_gap
        enforced = (iso.max_abs[0], iso.max_abs[3])
        constants = (iso.constants[0], iso.constants[3])
        stationary = all(
            deviation <= options.el_tolerance * (1.0 + abs(constant))
            for deviation, constant in zip(enforced, constants)
        )
        passed = stationary and iso.constraint_gap <= CONSTRAINT_TOLERANCE * max(1.0, abs(iso.target))
    transversality = transversality_residuals(problem, y)
    if transversality.initial_free:
        summary["transversality_initial"] = abs(transversality.initial)
    if transversality.terminal_free:
        summary["transversality_terminal"] = abs(transversality.terminal)
    return summary if passed else None


def solve_composition(problem: CompositionProblem, options: SolveOptions | None = None) -> Extremal:
    """Find the best stationary point of the composition functional over several starts.

    With an isoperimetric constraint the unknowns are extended by the multiplier λ of 𝓛 − λ𝒦. Among
    converged starts the best value per objective wins; values within the tie tolerance keep the
    earlier start.
    """
    options = options or SolveOptions()
    if problem.scale.kind != ScaleKind.EXACT_ISOLATED:
        raise InvalidProblemError(f"solve needs an exact isolated scale, got {problem.scale.provenance}")
    if options.multistart < 1:
        raise InvalidProblemError("multistart must be at least 1")
    unknown = free_indices(problem.scale.size, problem.y_a, problem.y_b)
    amplitude = _amplitude(problem)
    sign = 1.0 if options.objective == Objective.MIN else -1.0
    norms: list[float] = []
    best: Extremal | None = None
    for index, values in enumerate(initial_guesses(problem, options.multistart)):
        if problem.iso is None:
            system = _plain_system(problem, values, unknown)
            x0 = values[unknown]
        else:
            system = _iso_system(problem, values, unknown)
            x0 = np.append(values[unknown], _initial_multiplier(problem, values, unknown))
        result: NewtonResult = damped_newton(
            system, x0, max_iter=options.max_iter, tolerance=options.tolerance, singular="lstsq"
        )
        norms.append(result.residual_norm)
        if not result.converged:
            LOGGER.debug("Start %d did not converge (residual %.3e)", index, result.residual_norm)
            continue
        solution = values.copy()
        solution[unknown] = result.x[: unknown.size]
        if np.max(np.abs(solution)) > START_ESCAPE_FACTOR * amplitude:
            LOGGER.debug("Start %d escaped to max|y| = %.3e", index, np.max(np.abs(solution)))
            continue
        lam = float(result.x[-1]) if problem.iso is not None else None
        y = GridFunction(problem.scale, solution)
        summary = _summarize(problem, y, lam, options)
        if summary is None:
            LOGGER.debug("Start %d converged but fails the optimality checks", index)
            continue
        value, state = evaluate_composition(problem, y)
        LOGGER.debug("Start %d converged in %d iterations to L=%.17g", index, result.iterations, value)
        if best is None or sign * value < sign * best.value - TIE_TOLERANCE:
            best = Extremal(y, lam, value, state.F, summary, None, index, result.iterations)
    if best is None:
        raise NoConvergentStartError(norms)
    if problem.iso is not None:
        best = replace(best, normality=classify_extremal(problem, best.y, options.el_tolerance))
    LOGGER.info(
        "Selected start %d on %s with L=%.10g (%s)", best.start, problem.scale.provenance, best.value, options.objective
    )
    return best
