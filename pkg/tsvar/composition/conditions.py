"""Necessary optimality conditions of composition problems: Euler-Lagrange, transversality, isoperimetric."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ..constants import EL_TOLERANCE, ROOT_LOGGER_NAME
from ..expr import sample
from ..expr.nodes import Binary, Variable
from ..timescale import (
    GridFunction,
    delta_derivative,
    delta_integral,
    nabla_derivative,
    nabla_integral,
    running_delta_integral,
    running_nabla_integral,
)
from ..variational import InvalidProblemError
from .problem import (
    CompositionProblem,
    CompositionState,
    MissingConstraintError,
    Normality,
    evaluate_composition,
    evaluate_family,
    trajectory_values,
)

LOGGER = logging.getLogger(ROOT_LOGGER_NAME)


def _centered(f: GridFunction) -> tuple[GridFunction, float]:
    constant = float(np.mean(f.values))
    return GridFunction(f.scale, f.values - constant, f.lo, f.hi), constant


def _constant(f: GridFunction, tolerance: float) -> bool:
    centered, constant = _centered(f)
    return centered.max_abs() <= tolerance * (1.0 + abs(constant))


@dataclass(frozen=True)
class ELForms:
    """Both integral forms of the Euler-Lagrange equation with their means removed."""

    nabla_lhs: GridFunction
    delta_lhs: GridFunction
    nabla_form: GridFunction
    delta_form: GridFunction
    c_nabla: float
    c_delta: float

    @property
    def max_abs(self) -> float:
        """Largest deviation from constancy over both forms."""
        return max(self.nabla_form.max_abs(), self.delta_form.max_abs())

    def holds(self, tolerance: float = EL_TOLERANCE) -> bool:
        """Check both forms for constancy."""
        return _constant(self.nabla_lhs, tolerance) and _constant(self.delta_lhs, tolerance)


def el_forms_of(state: CompositionState) -> ELForms:
    """Build ξ^ρ + χ on [a,b]_κ and ξ + χ^σ on [a,b]^κ from an evaluated state."""
    nabla_lhs = state.xi.rho_shift() + state.chi
    delta_lhs = state.xi + state.chi.sigma_shift()
    nabla_form, c_nabla = _centered(nabla_lhs)
    delta_form, c_delta = _centered(delta_lhs)
    return ELForms(nabla_lhs, delta_lhs, nabla_form, delta_form, c_nabla, c_delta)


def el_residuals(problem: CompositionProblem, y: GridFunction) -> ELForms:
    """Get the nabla and delta integral forms of the Euler-Lagrange equation along y."""
    _, state = evaluate_composition(problem, y)
    return el_forms_of(state)


@dataclass(frozen=True)
class Transversality:
    """Natural boundary condition residuals at both ends, with which ends are free."""

    initial: float
    terminal: float
    initial_free: bool
    terminal_free: bool

    def holds(self, tolerance: float = EL_TOLERANCE) -> bool:
        """Check the conditions of the free endpoints."""
        checked = [
            value
            for value, free in ((self.initial, self.initial_free), (self.terminal, self.terminal_free))
            if free
        ]
        return all(abs(value) <= tolerance for value in checked)


def transversality_residuals(problem: CompositionProblem, y: GridFunction) -> Transversality:
    """Get the transversality residuals at t = a and t = b.

    The conditions need ρ(σ(a)) = a and σ(ρ(b)) = b, which hold on every finite scale since a and b are its
    least and greatest points.
    """
    scale = problem.scale
    values = trajectory_values(problem, y)
    evaluation = evaluate_family(problem.family, scale, values)
    initial = float(evaluation.left.values[0] + evaluation.right.values[0])
    terminal = 0.0
    for weight, item in zip(evaluation.weights[: problem.family.k], evaluation.delta):
        terminal += weight * (item.partials.v[-1] + item.weights[-1] * item.partials.y[-1])
    for weight, item in zip(evaluation.weights[problem.family.k :], evaluation.nabla):
        terminal += weight * item.partials.v[-1]
    return Transversality(initial, float(terminal), problem.y_a is None, problem.y_b is None)


@dataclass(frozen=True)
class IsoResiduals:
    """The four isoperimetric conditions on [a,b]^κ_κ with their means removed."""

    conditions: tuple[GridFunction, GridFunction, GridFunction, GridFunction]
    constants: tuple[float, float, float, float]
    lam: float
    constraint_value: float
    target: float

    @property
    def max_abs(self) -> tuple[float, ...]:
        """Deviation from constancy per condition."""
        return tuple(condition.max_abs() for condition in self.conditions)

    @property
    def constraint_gap(self) -> float:
        """|𝒦[y] − d|."""
        return abs(self.constraint_value - self.target)

    def holds(self, tolerance: float = EL_TOLERANCE) -> bool:
        """Check every condition for constancy."""
        return all(
            deviation <= tolerance * (1.0 + abs(constant))
            for deviation, constant in zip(self.max_abs, self.constants)
        )


def _require_iso(problem: CompositionProblem, operation: str) -> None:
    if problem.iso is None:
        raise MissingConstraintError(operation)


def iso_residuals(problem: CompositionProblem, y: GridFunction, lam: float) -> IsoResiduals:
    """Get the four combinations ξ^ρ/ξ + χ/χ^σ − λ(u^ρ/u + w/w^σ) minus their means."""
    _require_iso(problem, "iso_residuals")
    _, state = evaluate_composition(problem, y)
    assert state.u is not None and state.w is not None and state.constraint_value is not None
    assert problem.iso is not None
    lo, hi = 1, problem.scale.size - 1
    xi_rho, xi = state.xi.rho_shift().restrict(lo, hi), state.xi.restrict(lo, hi)
    chi, chi_sigma = state.chi.restrict(lo, hi), state.chi.sigma_shift().restrict(lo, hi)
    u_rho, u = state.u.rho_shift().restrict(lo, hi), state.u.restrict(lo, hi)
    w, w_sigma = state.w.restrict(lo, hi), state.w.sigma_shift().restrict(lo, hi)
    combinations = (
        xi_rho + chi - lam * (u_rho + w),
        xi + chi_sigma - lam * (u_rho + w),
        xi_rho + chi - lam * (u + w_sigma),
        xi + chi_sigma - lam * (u + w_sigma),
    )
    centered = [_centered(combination) for combination in combinations]
    return IsoResiduals(
        conditions=(centered[0][0], centered[1][0], centered[2][0], centered[3][0]),
        constants=(centered[0][1], centered[1][1], centered[2][1], centered[3][1]),
        lam=float(lam),
        constraint_value=state.constraint_value,
        target=problem.iso.target,
    )


def classify_extremal(problem: CompositionProblem, y: GridFunction, tolerance: float = EL_TOLERANCE) -> Normality:
    """Decide whether y is an extremal of the constraint functional (abnormal) or not (normal).

    Both u + w^σ on [a,b]^κ_κ and u^ρ + w on [a,b]^κ_κ must equal one common constant, which means
    u + w^σ is constant on all of [a,b]^κ. Deviations within a factor 10 of the tolerance are
    reported as undetermined.
    """
    _require_iso(problem, "classify_extremal")
    _, state = evaluate_composition(problem, y)
    assert state.u is not None and state.w is not None
    combination = state.u + state.w.sigma_shift()
    centered, constant = _centered(combination)
    deviation = centered.max_abs() / (1.0 + abs(constant))
    if deviation <= tolerance / 10.0:
        normality = Normality.ABNORMAL
    elif deviation <= tolerance * 10.0:
        normality = Normality.UNDETERMINED
    else:
        normality = Normality.NORMAL
    LOGGER.debug("Constraint combination deviates by %.3e: %s", deviation, normality)
    return normality


def el_form_gap(problem: CompositionProblem, y: GridFunction) -> GridFunction:
    """Get χ(t) − χ(σ̃(ρ̃(t))) on [a,b]_κ using the jumps of the modelled continuum.

    This is the gap between the nabla form at t and the delta form at ρ̃(t). It vanishes wherever
    the modelled continuum is regular.
    """
    _, state = evaluate_composition(problem, y)
    scale = problem.scale
    gap = np.zeros(scale.size - 1)
    for index in range(1, scale.size):
        backward = scale.modelled_rho_index(index)
        backward = index if backward is None else backward
        target = scale.modelled_sigma_index(backward)
        target = backward if target is None else target
        if target < state.chi.lo:
            raise InvalidProblemError(f"χ is not defined at the modelled jump of index {index}")
        gap[index - 1] = state.chi.at_index(index) - state.chi.at_index(target)
    return GridFunction(scale, gap, 1, scale.size)


@dataclass(frozen=True)
class QuotientResiduals:
    """Explicit Euler-Lagrange and transversality expressions of the quotient problem F1/F2."""

    nabla_form: GridFunction
    delta_form: GridFunction
    c_nabla: float
    c_delta: float
    initial: float
    terminal: float
    F1: float
    F2: float


def is_quotient(problem: CompositionProblem) -> bool:
    """Check for one delta and one nabla integrand combined as F1/F2."""
    family = problem.family
    if family.k != 1 or family.n != 1:
        return False
    match family.outer.root:
        case Binary(op="/", left=Variable(name="F1"), right=Variable(name="F2")):
            return True
    return False


def quotient_el_residuals(problem: CompositionProblem, y: GridFunction) -> QuotientResiduals:
    """Evaluate the quotient-problem Euler-Lagrange equations directly from delta and nabla calculus."""
    if not is_quotient(problem):
        raise InvalidProblemError("the quotient formulas need one delta and one nabla integrand with H = F1/F2")
    trajectory_values(problem, y)
    scale = problem.scale
    size = scale.size
    delta_f, nabla_f = problem.family.delta_integrands[0], problem.family.nabla_integrands[0]
    slope, forward = delta_derivative(y), y.sigma_shift()
    first = sample(delta_f, slope.points, forward.values, slope.values)
    back_slope, backward = nabla_derivative(y), y.rho_shift()
    second = sample(nabla_f, back_slope.points, backward.values, back_slope.values)

    F1 = delta_integral(GridFunction(scale, first.value, 0, size - 1), scale.a, scale.b)
    F2 = nabla_integral(GridFunction(scale, second.value, 1, size), scale.a, scale.b)
    first_y = GridFunction(scale, first.y, 0, size - 1)
    second_y = GridFunction(scale, second.y, 1, size)
    A = GridFunction(scale, first.v, 0, size - 1) - running_delta_integral(first_y)
    B = GridFunction(scale, second.v, 1, size) - running_nabla_integral(second_y)
    ratio = F1 / F2**2

    nabla_form, c_nabla = _centered(A.rho_shift() / F2 - ratio * B)
    delta_form, c_delta = _centered(A / F2 - ratio * B.sigma_shift())
    a, sigma_a = scale.a, float(scale.sigma[0])
    rho_b, b = float(scale.rho[-1]), scale.b
    initial = first.v[0] / F2 - ratio * (second.v[0] - nabla_integral(second_y, a, sigma_a))
    terminal = (first.v[-1] + delta_integral(first_y, rho_b, b)) / F2 - ratio * second.v[-1]
    return QuotientResiduals(
        nabla_form=nabla_form,
        delta_form=delta_form,
        c_nabla=c_nabla,
        c_delta=c_delta,
        initial=float(initial),
        terminal=float(terminal),
        F1=F1,
        F2=F2,
    )
