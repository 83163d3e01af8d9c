"""Delta-nabla composition functionals H(F_1, ..., F_{k+n}) and their isoperimetric constraints."""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from enum import StrEnum

import numpy as np

from .. import TsvarError
from ..constants import ROOT_LOGGER_NAME
from ..expr import DiffValue, Expression, Integrand, as_integrand, eval_with_partials, parse
from ..timescale import GridFunction, TimeScale
from ..variational import Discretization, Flavor, InvalidProblemError, check_boundary, discretize

LOGGER = logging.getLogger(ROOT_LOGGER_NAME)


class MissingConstraintError(TsvarError):
    """An isoperimetric operation was requested for a problem without a constraint."""

    def __init__(self, operation: str) -> None:
        """Create a MissingConstraintError instance."""
        super().__init__(f"{operation} needs an isoperimetric constraint, the problem has none")


class Objective(StrEnum):
    """Which stationary point the solver keeps."""

    MIN = "min"
    MAX = "max"


class Normality(StrEnum):
    """Classification of an isoperimetric extremal."""

    NORMAL = "normal"
    ABNORMAL = "abnormal"
    UNDETERMINED = "undetermined"


def argument_names(prefix: str, count: int) -> tuple[str, ...]:
    """Names of the outer function arguments: F1..Fm or G1..Gm."""
    return tuple(f"{prefix}{index}" for index in range(1, count + 1))


@dataclass(frozen=True)
class IntegralFamily:
    """An outer function of delta integrals followed by nabla integrals."""

    delta_integrands: tuple[Integrand, ...]
    nabla_integrands: tuple[Integrand, ...]
    outer: Expression
    prefix: str

    def __post_init__(self) -> None:
        """Validate the family."""
        if not self.delta_integrands and not self.nabla_integrands:
            raise InvalidProblemError("at least one delta or nabla integrand is needed")
        unknown = set(self.outer.variables) - set(self.names)
        if unknown:
            raise InvalidProblemError(f"the outer function uses undeclared arguments {sorted(unknown)}")

    @classmethod
    def create(
        cls,
        delta: Sequence[Integrand | Expression | str],
        nabla: Sequence[Integrand | Expression | str],
        outer: Expression | str,
        prefix: str,
    ) -> IntegralFamily:
        """Create a family from integrand texts and the outer function text."""
        names = argument_names(prefix, len(delta) + len(nabla))
        return cls(
            tuple(as_integrand(item) for item in delta),
            tuple(as_integrand(item) for item in nabla),
            parse(outer, names) if isinstance(outer, str) else outer,
            prefix,
        )

    @property
    def k(self) -> int:
        """Number of delta integrals."""
        return len(self.delta_integrands)

    @property
    def n(self) -> int:
        """Number of nabla integrals."""
        return len(self.nabla_integrands)

    @property
    def names(self) -> tuple[str, ...]:
        """Outer function argument names."""
        return argument_names(self.prefix, self.k + self.n)


@dataclass(frozen=True)
class IsoConstraint:
    """The constraint P(G_1, ..., G_{m+p}) = d."""

    family: IntegralFamily
    target: float

    def __post_init__(self) -> None:
        """Validate the target."""
        if not np.isfinite(self.target):
            raise InvalidProblemError("the isoperimetric target d must be finite")

    @classmethod
    def create(
        cls,
        delta: Sequence[Integrand | Expression | str],
        nabla: Sequence[Integrand | Expression | str],
        outer: Expression | str,
        target: float,
    ) -> IsoConstraint:
        """Create a constraint from its texts."""
        return cls(IntegralFamily.create(delta, nabla, outer, "G"), float(target))


@dataclass(frozen=True)
class CompositionProblem:
    """Extremize H of delta and nabla integrals of y, optionally under an isoperimetric constraint."""

    scale: TimeScale
    family: IntegralFamily
    y_a: float | None = None
    y_b: float | None = None
    iso: IsoConstraint | None = None

    def __post_init__(self) -> None:
        """Validate the problem."""
        if self.scale.size < 3:
            raise InvalidProblemError(f"A composition problem needs at least three points, {self.scale.provenance}")
        for name, value in (("y_a", self.y_a), ("y_b", self.y_b)):
            if value is not None and not np.isfinite(value):
                raise InvalidProblemError(f"Boundary value {name} must be finite")

    @classmethod
    def create(
        cls,
        scale: TimeScale,
        delta: Sequence[Integrand | Expression | str],
        nabla: Sequence[Integrand | Expression | str],
        outer: Expression | str,
        y_a: float | None = None,
        y_b: float | None = None,
        iso: IsoConstraint | None = None,
    ) -> CompositionProblem:
        """Create a problem from integrand texts and the text of H over F1..Fm."""
        return cls(scale, IntegralFamily.create(delta, nabla, outer, "F"), y_a, y_b, iso)


@dataclass(frozen=True)
class FamilyEvaluation:
    """An integral family evaluated along a trajectory.

    ``left`` is ξ (or u) on [a,b]^κ and ``right`` is χ (or w) on [a,b]_κ.
    """

    values: np.ndarray
    outer: DiffValue
    weights: np.ndarray
    delta: tuple[Discretization, ...]
    nabla: tuple[Discretization, ...]
    left: GridFunction
    right: GridFunction

    @property
    def value(self) -> float:
        """The outer function at the component integrals."""
        return float(self.outer.value)

    def gradient(self) -> np.ndarray:
        """Gradient of the composition with respect to every grid value."""
        gradients = [item.gradient() for item in (*self.delta, *self.nabla)]
        return np.sum([weight * gradient for weight, gradient in zip(self.weights, gradients)], axis=0)

    def hessian(self, names: Sequence[str]) -> np.ndarray:
        """Hessian: Σ H'_i ∇²F_i + Σ H''_il ∇F_i ∇F_lᵀ."""
        components = (*self.delta, *self.nabla)
        gradients = [item.gradient() for item in components]
        hessian = np.sum([weight * item.hessian() for weight, item in zip(self.weights, components)], axis=0)
        for i, first in enumerate(names):
            for j, second in enumerate(names):
                curvature = float(self.outer.d2(first, second))
                if curvature:
                    hessian += curvature * np.outer(gradients[i], gradients[j])
        return hessian


def evaluate_family(family: IntegralFamily, scale: TimeScale, values: np.ndarray) -> FamilyEvaluation:
    """Evaluate the component integrals, the outer function with its partials and the ξ/χ combinations."""
    delta = tuple(discretize(item, Flavor.DELTA, scale, values) for item in family.delta_integrands)
    nabla = tuple(discretize(item, Flavor.NABLA, scale, values) for item in family.nabla_integrands)
    integrals = np.array([item.value for item in (*delta, *nabla)])
    outer = eval_with_partials(family.outer, dict(zip(family.names, (float(value) for value in integrals))))
    weights = np.array([float(outer.d(name)) for name in family.names])
    size = scale.size
    left = np.zeros(size - 1)
    for weight, item in zip(weights[: family.k], delta):
        accumulated = np.concatenate(([0.0], np.cumsum(item.weights * item.partials.y)[:-1]))
        left += weight * (item.partials.v - accumulated)
    right = np.zeros(size - 1)
    for weight, item in zip(weights[family.k :], nabla):
        right += weight * (item.partials.v - np.cumsum(item.weights * item.partials.y))
    return FamilyEvaluation(
        values=integrals,
        outer=outer,
        weights=weights,
        delta=delta,
        nabla=nabla,
        left=GridFunction(scale, left, 0, size - 1),
        right=GridFunction(scale, right, 1, size),
    )


@dataclass(frozen=True)
class CompositionState:
    """Component integrals, outer partials and the ξ, χ (u, w) combinations along a trajectory."""

    F: np.ndarray
    Hprime: np.ndarray
    xi: GridFunction
    chi: GridFunction
    G: np.ndarray | None = None
    Pprime: np.ndarray | None = None
    u: GridFunction | None = None
    w: GridFunction | None = None
    constraint_value: float | None = None


def trajectory_values(problem: CompositionProblem, y: GridFunction) -> np.ndarray:
    """Check y against the problem scale and boundary data and get its values."""
    check_boundary(problem.scale, problem.y_a, problem.y_b, y)
    return np.asarray(y.values)


def evaluate_composition(problem: CompositionProblem, y: GridFunction) -> tuple[float, CompositionState]:
    """Get 𝓛[y] = H(F) and the state the optimality conditions are read from."""
    values = trajectory_values(problem, y)
    main = evaluate_family(problem.family, problem.scale, values)
    state = CompositionState(F=main.values, Hprime=main.weights, xi=main.left, chi=main.right)
    if problem.iso is not None:
        constraint = evaluate_family(problem.iso.family, problem.scale, values)
        state = CompositionState(
            F=main.values,
            Hprime=main.weights,
            xi=main.left,
            chi=main.right,
            G=constraint.values,
            Pprime=constraint.weights,
            u=constraint.left,
            w=constraint.right,
            constraint_value=constraint.value,
        )
    LOGGER.debug("Composition on %s: F=%s, L=%.17g", problem.scale.provenance, main.values, main.value)
    return main.value, state
