"""Equations of variation of integro-differential equations and the Helmholtz self-adjointness test."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import StrEnum

import numpy as np

from ..constants import (
    DEFAULT_HELMHOLTZ_TRIALS,
    HELMHOLTZ_CERTIFY_TOLERANCE,
    HELMHOLTZ_REJECT_THRESHOLD,
    HELMHOLTZ_STRUCTURE_TOLERANCE,
    ROOT_LOGGER_NAME,
)
from ..expr import DomainFaultError, Expression, Integrand, PartialIntegrand, SampledPartials, as_integrand, sample
from ..timescale import GridFunction, TimeScale, delta_derivative, running_delta_integral
from ..variational import InvalidProblemError

LOGGER = logging.getLogger(ROOT_LOGGER_NAME)


class HelmholtzStatus(StrEnum):
    """Verdict of the Helmholtz test."""

    CERTIFIED_SELF_ADJOINT = "CERTIFIED_SELF_ADJOINT"
    NOT_EULER_LAGRANGE = "NOT_EULER_LAGRANGE"
    UNDECIDED = "UNDECIDED"


@dataclass(frozen=True)
class IntegroDiffEquation:
    """H[y](t) + ∫_{t0}^t G[y](s) Δs = const with [y](t) = (t, y^σ(t), y^Δ(t)); t0 defaults to the scale start."""

    H: Integrand
    G: Integrand
    t0: float | None = None

    @classmethod
    def create(cls, H: Integrand | Expression | str, G: Integrand | Expression | str) -> IntegroDiffEquation:
        """Create an equation from expression texts over t, y and v."""
        return cls(as_integrand(H), as_integrand(G))

    @classmethod
    def from_lagrangian(cls, lagrangian: Integrand | Expression | str) -> IntegroDiffEquation:
        """The integrated Euler-Lagrange equation L_v − ∫ L_y = const of a Lagrangian."""
        base = as_integrand(lagrangian)
        return cls(PartialIntegrand(base, "v"), PartialIntegrand(base, "y", -1.0))

    @property
    def label(self) -> str:
        """Describe the equation."""
        return f"{self.H.label} + ∫ {self.G.label}"


def _along(integrand: Integrand, curve: GridFunction) -> SampledPartials:
    """Sample an integrand at (t, y^σ, y^Δ) on [a,b]^κ."""
    slope = delta_derivative(curve)
    return sample(integrand, slope.points, curve.sigma_shift().values, slope.values)


def _start_index(ide: IntegroDiffEquation, scale: TimeScale) -> int:
    start = 0 if ide.t0 is None else scale.index_of(ide.t0)
    if start != 0:
        raise InvalidProblemError("the lower limit t0 must be the start of the scale")
    return start


@dataclass(frozen=True)
class EquationOfVariation:
    """The linearized equation along a base curve applied to u, on [a,b]^κ."""

    residual: GridFunction
    degenerate_points: tuple[float, ...]


def equation_of_variation(ide: IntegroDiffEquation, base: GridFunction, u: GridFunction) -> EquationOfVariation:
    """Get H_y u^σ + H_v u^Δ + ∫_{t0}^t (G_y u^σ + G_v u^Δ) Δs with the partials taken along base."""
    scale = base.scale
    if u.scale != scale or not (base.is_full and u.is_full):
        raise InvalidProblemError("the base curve and u must be defined on every point of one scale")
    _start_index(ide, scale)
    H, G = _along(ide.H, base), _along(ide.G, base)
    slope, forward = delta_derivative(u), u.sigma_shift()
    size = scale.size - 1
    inner = GridFunction(scale, G.y * forward.values + G.v * slope.values, 0, size)
    accumulated = running_delta_integral(inner).restrict(0, size)
    residual = GridFunction(scale, H.y * forward.values + H.v * slope.values, 0, size) + accumulated
    degenerate = tuple(float(t) for t in slope.points[np.abs(H.v) <= HELMHOLTZ_STRUCTURE_TOLERANCE])
    if degenerate:
        LOGGER.warning("H_v vanishes along the base curve at t = %s", ", ".join(f"{t:g}" for t in degenerate))
    return EquationOfVariation(residual, degenerate)


def self_adjoint_operator(p: GridFunction, r: GridFunction, u: GridFunction) -> GridFunction:
    """Get p(t)u^Δ(t) + ∫_{t0}^t r(s)u^σ(s) Δs on [a,b]^κ."""
    scale = u.scale
    size = scale.size - 1
    forward = u.sigma_shift().restrict(0, size)
    accumulated = running_delta_integral(r.restrict(0, size) * forward).restrict(0, size)
    return p.restrict(0, size) * delta_derivative(u) + accumulated


def sample_curves(scale: TimeScale, trials: int, rng: np.random.Generator) -> list[GridFunction]:
    """Endpoint-anchored cubic profiles with values in [−1, 1]."""
    s = (scale.points - scale.a) / (scale.b - scale.a)
    curves = []
    for _ in range(trials):
        start, end, bend, twist = rng.uniform(-1.0, 1.0, 4)
        values = start * (1.0 - s) + end * s + bend * s * (1.0 - s) + twist * s * s * (1.0 - s)
        curves.append(GridFunction(scale, values / max(1.0, float(np.max(np.abs(values))))))
    return curves


@dataclass(frozen=True)
class Witness:
    """A point where H_y + G_v does not vanish."""

    curve: GridFunction
    t: float
    value: float


@dataclass(frozen=True)
class HelmholtzVerdict:
    """Three-valued outcome of the self-adjointness test."""

    status: HelmholtzStatus
    witness: Witness | None
    notes: tuple[str, ...] = field(default_factory=tuple)
    seed: int = 0
    trials: int = 0
    max_abs_d: float = 0.0


def _structural(H: SampledPartials, G: SampledPartials, index: int) -> bool:
    """Whether H_y and G_v have no (y, v) dependence at a point."""
    curvatures = (H.yy[index], H.yv[index], G.yv[index], G.vv[index])
    return all(abs(value) <= HELMHOLTZ_STRUCTURE_TOLERANCE for value in curvatures)


def helmholtz_check(
    ide: IntegroDiffEquation, scale: TimeScale, trials: int = DEFAULT_HELMHOLTZ_TRIALS, seed: int = 0
) -> HelmholtzVerdict:
    """Evaluate D = H_y + G_v along random curves and decide self-adjointness where the evidence allows it.

    D ≡ 0 certifies a self-adjoint equation of variation. A structural D ≠ 0, one that does not depend
    on the curve, rules out an Euler-Lagrange equation. Everything else stays undecided.
    """
    if trials < 1:
        raise InvalidProblemError("the Helmholtz test needs at least one trial")
    _start_index(ide, scale)
    structural = ide.H.has_second_partials and ide.G.has_second_partials
    rng = np.random.default_rng(seed)
    notes: list[str] = []
    largest: Witness | None = None
    rejecting: Witness | None = None
    evaluated = 0
    for number, curve in enumerate(sample_curves(scale, trials, rng)):
        try:
            H, G = _along(ide.H, curve), _along(ide.G, curve)
        except DomainFaultError as error:
            notes.append(f"curve {number} skipped: {error}")
            continue
        evaluated += 1
        D = H.y + G.v
        points = scale.points[: scale.size - 1]
        vanishing = points[np.abs(H.v) <= HELMHOLTZ_STRUCTURE_TOLERANCE]
        if vanishing.size:
            notes.append(f"H_v vanishes on curve {number} at t = {', '.join(f'{t:g}' for t in vanishing)}")
        index = int(np.argmax(np.abs(D)))
        if largest is None or abs(D[index]) > abs(largest.value):
            largest = Witness(curve, float(points[index]), float(D[index]))
        if rejecting is None and structural:
            for candidate in np.flatnonzero(np.abs(D) > HELMHOLTZ_REJECT_THRESHOLD):
                if _structural(H, G, int(candidate)):
                    rejecting = Witness(curve, float(points[candidate]), float(D[candidate]))
                    break
    max_abs_d = abs(largest.value) if largest is not None else 0.0
    if evaluated == 0:
        status, witness = HelmholtzStatus.UNDECIDED, None
        notes.append("no test curve could be evaluated")
    elif rejecting is not None:
        status, witness = HelmholtzStatus.NOT_EULER_LAGRANGE, rejecting
    elif max_abs_d <= HELMHOLTZ_CERTIFY_TOLERANCE:
        status, witness = HelmholtzStatus.CERTIFIED_SELF_ADJOINT, None
    else:
        status, witness = HelmholtzStatus.UNDECIDED, largest
        notes.append("H_y + G_v does not vanish but depends on the curve")
    if status == HelmholtzStatus.UNDECIDED and not structural:
        notes.append("second partials are unavailable, a structural violation cannot be established")
    for note in notes:
        LOGGER.warning("Helmholtz test of %s: %s", ide.label, note)
    LOGGER.info("Helmholtz test of %s on %s: %s (max |D| = %.3e)", ide.label, scale.provenance, status, max_abs_d)
    return HelmholtzVerdict(status, witness, tuple(notes), seed, trials, max_abs_d)
