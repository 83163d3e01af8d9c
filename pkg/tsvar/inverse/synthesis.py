"""Synthesis of Lagrangians that attain a local minimum at a given trajectory on an isolated scale."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .. import TsvarError
from ..constants import (
    EL_TOLERANCE,
    LEGENDRE_TOLERANCE,
    ROOT_LOGGER_NAME,
    SYNTHESIS_DECREASE_TOLERANCE,
    SYNTHESIS_PROBE_MAGNITUDE,
    SYNTHESIS_PROBES,
)
from ..expr import DiffValue, Expression, eval_with_partials, evaluate, parse
from ..timescale import GridFunction, ScaleKind, TimeScale, delta_derivative, ts_exponential
from ..variational import (
    Flavor,
    VariationalProblem,
    dagger,
    el_integral_residual,
    evaluate_functional,
    legendre_quantity,
)

LOGGER = logging.getLogger(ROOT_LOGGER_NAME)


class SynthesisError(TsvarError):
    """No Lagrangian can be synthesized for the given data."""

    def __init__(self, reason: str) -> None:
        """Create a SynthesisError instance."""
        super().__init__(f"Cannot synthesize a Lagrangian: {reason}")


def _spread(value: object, size: int) -> np.ndarray:
    return np.array(np.broadcast_to(np.asarray(value, dtype=float), (size,)))


@dataclass(frozen=True)
class SynthesisSpec:
    """Data of the synthesis: P(t, y), q(t, y), w(t, y, v), the Legendre target p(t), C, R0 and the minimizer y0."""

    scale: TimeScale
    P: Expression
    q: Expression
    w: Expression
    p: Expression
    C: float
    R0: float
    y0: GridFunction | None = None

    def __post_init__(self) -> None:
        """Validate the spec and fill in y0 ≡ 0."""
        scale = self.scale
        if scale.kind != ScaleKind.EXACT_ISOLATED:
            raise SynthesisError(f"the scale must be exact and isolated, got {scale.provenance}")
        if scale.size < 3:
            raise SynthesisError(f"at least three points are needed, {scale.provenance}")
        if not (np.isfinite(self.C) and np.isfinite(self.R0)):
            raise SynthesisError("C and R0 must be finite")
        if np.any(scale.mu[: scale.size - 2] <= 0):
            raise SynthesisError("the graininess vanishes at a point of [a,b]^κ²")
        if self.y0 is None:
            object.__setattr__(self, "y0", GridFunction.constant(scale, 0.0))
        elif not self.y0.is_full or self.y0.scale != scale:
            raise SynthesisError("y0 must be defined on every point of the scale")
        targets = self.target_legendre()
        bad = np.flatnonzero(targets <= 0)
        if bad.size:
            raise SynthesisError(f"p must be positive on [a,b]^κ², p({scale.points[bad[0]]!r}) = {targets[bad[0]]!r}")

    @classmethod
    def create(
        cls,
        scale: TimeScale,
        p: Expression | str,
        R0: float,
        *,
        P: Expression | str = "0",
        q: Expression | str = "0",
        w: Expression | str = "0",
        C: float = 0.0,
        y0: GridFunction | None = None,
    ) -> SynthesisSpec:
        """Create a spec from expression texts."""

        def expression(value: Expression | str, variables: tuple[str, ...]) -> Expression:
            return parse(value, variables) if isinstance(value, str) else value

        return cls(
            scale=scale,
            P=expression(P, ("t", "y")),
            q=expression(q, ("t", "y")),
            w=expression(w, ("t", "y", "v")),
            p=expression(p, ("t",)),
            C=float(C),
            R0=float(R0),
            y0=y0,
        )

    @property
    def inner(self) -> int:
        """Number of points of [a,b]^κ²."""
        return self.scale.size - 2

    def target_legendre(self) -> np.ndarray:
        """p at the points of [a,b]^κ²."""
        t = self.scale.points[: self.inner]
        return _spread(evaluate(self.p, {"t": t}), t.size)


@dataclass(frozen=True, eq=False)
class _Reference:
    """Partials of P and q at the shifted origin, on [a,b]^κ."""

    P_y: np.ndarray
    P_yy: np.ndarray
    q: np.ndarray
    q_y: np.ndarray
    w: np.ndarray


def _reference(spec: SynthesisSpec) -> _Reference:
    t = spec.scale.points[: spec.scale.size - 1]
    zeros = np.zeros_like(t)
    time = DiffValue.constant(t)
    P = eval_with_partials(spec.P, {"t": time, "y": DiffValue.variable("y", zeros)})
    q = eval_with_partials(spec.q, {"t": time, "y": DiffValue.variable("y", zeros)})
    w = evaluate(spec.w, {"t": t, "y": zeros, "v": zeros})
    return _Reference(
        P_y=_spread(P.d("y"), t.size),
        P_yy=_spread(P.d2("y", "y"), t.size),
        q=_spread(q.value, t.size),
        q_y=_spread(q.d("y"), t.size),
        w=_spread(w, t.size),
    )


def recursion_coefficients(spec: SynthesisSpec) -> tuple[GridFunction, GridFunction]:
    """Get r and s of the linear dynamic equation R^Δ = r R + s on [a,b]^κ².

    r = −(1 + μ(μ^σ)†) / (μ²(μ^σ)†) and s = (p − μ(2Q_y + μP_yy)) / (μ²(μ^σ)†),
    with Q_y(t, 0) = q_y(t, 0).
    """
    reference = _reference(spec)
    size = spec.inner
    mu = spec.scale.mu[:size]
    mu_next = dagger(spec.scale.mu[1 : size + 1])
    denominator = mu * mu * mu_next
    r = -(1.0 + mu * mu_next) / denominator
    bracket = mu * (2.0 * reference.q_y[:size] + mu * reference.P_yy[:size])
    s = (spec.target_legendre() - bracket) / denominator
    return GridFunction(spec.scale, r, 0, size), GridFunction(spec.scale, s, 0, size)


def solve_R_recursion(spec: SynthesisSpec) -> GridFunction:
    """Get R(t) = e_r(t,a)R0 + ∫_a^t e_r(t,σ(τ)) s(τ) Δτ on [a,b]^κ.

    This R satisfies R + μ(2Q_y + μP_yy + (μ^σ)†R^σ) = p on [a,b]^κ².
    """
    r, s = recursion_coefficients(spec)
    scale = spec.scale
    exponential = ts_exponential(scale, r, scale.a)
    e = exponential.values
    # e_r(t, σ(τ)) = e_r(t, a) / e_r(σ(τ), a); the factors 1 + μr = −μ^σ/μ never vanish
    terms = scale.mu[: s.hi] * s.values / e[1:]
    R = e * np.concatenate(([spec.R0], spec.R0 + np.cumsum(terms)))
    LOGGER.debug("R on %s from R0=%.6g: %s", scale.provenance, spec.R0, R)
    return GridFunction(scale, R, 0, scale.size - 1)


@dataclass(frozen=True, eq=False)
class SynthesizedLagrangian:
    """L(t, y, v) = P(t, z) + Q(t, z)ζ + ½(R(t) + w(t, z, ζ) − w(t, 0, 0))ζ².

    Here z = y − y0^σ, ζ = v − y0^Δ and Q(t, z) = C + Σ_{τ<t} μ(τ)P_y(τ, 0) + q(t, z) − q(t, 0).
    The Lagrangian is defined on [a,b]^κ.
    """

    spec: SynthesisSpec
    R: np.ndarray
    integral_P: np.ndarray
    q_ref: np.ndarray
    w_ref: np.ndarray
    y0_sigma: np.ndarray
    y0_delta: np.ndarray
    name: str = field(default="synthesized")

    @property
    def label(self) -> str:
        """Describe the Lagrangian."""
        return f"{self.name}(P={self.spec.P}, q={self.spec.q}, w={self.spec.w}, p={self.spec.p})"

    @property
    def has_second_partials(self) -> bool:
        """The composition keeps exact second partials."""
        return True

    @property
    def R_func(self) -> GridFunction:
        """R on [a,b]^κ."""
        return GridFunction(self.spec.scale, self.R, 0, self.spec.scale.size - 1)

    @property
    def Q_func(self) -> GridFunction:
        """Q(t, 0) = C + Σ_{τ<t} μ(τ)P_y(τ, 0) on [a,b]^κ."""
        return GridFunction(self.spec.scale, self.spec.C + self.integral_P, 0, self.spec.scale.size - 1)

    def partials(self, t: np.ndarray, y: np.ndarray | DiffValue, v: np.ndarray | DiffValue) -> DiffValue:
        """Evaluate at points of [a,b]^κ."""
        scale = self.spec.scale
        index = scale.indices_of(t)
        if np.any(index > scale.size - 2):
            raise SynthesisError(f"the Lagrangian is defined on [a,b]^κ, not at t = {scale.b!r}")
        y = y if isinstance(y, DiffValue) else DiffValue.variable("y", y)
        v = v if isinstance(v, DiffValue) else DiffValue.variable("v", v)
        z = y - self.y0_sigma[index]
        zeta = v - self.y0_delta[index]
        time = DiffValue.constant(np.asarray(t, dtype=float))
        P = eval_with_partials(self.spec.P, {"t": time, "y": z})
        q = eval_with_partials(self.spec.q, {"t": time, "y": z})
        w = eval_with_partials(self.spec.w, {"t": time, "y": z, "v": zeta})
        coefficient = q - self.q_ref[index] + (self.spec.C + self.integral_P[index])
        curvature = (w - self.w_ref[index] + self.R[index]) * 0.5
        return P + coefficient * zeta + curvature * zeta * zeta


def synthesize_lagrangian(spec: SynthesisSpec) -> SynthesizedLagrangian:
    """Build the Lagrangian whose strengthened Legendre quantity along y0 is p and for which y0 is an extremal."""
    scale = spec.scale
    assert spec.y0 is not None
    R = solve_R_recursion(spec)
    reference = _reference(spec)
    kappa = scale.size - 1
    integral_P = np.concatenate(([0.0], np.cumsum(scale.mu[: kappa - 1] * reference.P_y[: kappa - 1])))
    lagrangian = SynthesizedLagrangian(
        spec=spec,
        R=np.asarray(R.values),
        integral_P=integral_P,
        q_ref=reference.q,
        w_ref=reference.w,
        y0_sigma=np.asarray(spec.y0.values[1:]),
        y0_delta=np.asarray(delta_derivative(spec.y0).values),
    )
    LOGGER.info("Synthesized %s on %s", lagrangian.label, scale.provenance)
    return lagrangian


@dataclass(frozen=True)
class SynthesisReport:
    """Outcome of the three checks of a synthesized Lagrangian."""

    el_residual: float
    legendre: GridFunction
    legendre_deviation: float
    probe_min_change: float
    failures: tuple[str, ...]
    failing_points: tuple[float, ...]
    seed: int

    @property
    def passed(self) -> bool:
        """Whether every check passed."""
        return not self.failures


def verify_synthesis(
    lagrangian: SynthesizedLagrangian,
    spec: SynthesisSpec,
    *,
    probes: int = SYNTHESIS_PROBES,
    magnitude: float = SYNTHESIS_PROBE_MAGNITUDE,
    seed: int = 0,
) -> SynthesisReport:
    """Check that y0 is an extremal, that the Legendre quantity equals p and that no small perturbation decreases L."""
    scale = spec.scale
    y0 = spec.y0
    assert y0 is not None
    problem = VariationalProblem(scale, lagrangian, Flavor.DELTA, y0.values[0], y0.values[-1])
    failures: list[str] = []
    failing_points: list[float] = []

    el = el_integral_residual(problem, y0, tolerance=EL_TOLERANCE)
    if el.max_abs_residual > EL_TOLERANCE:
        at = int(np.argmax(np.abs(el.residual.values)))
        failures.append(f"Euler-Lagrange residual {el.max_abs_residual:.3e} at t={scale.points[at]!r}")

    legendre = legendre_quantity(problem, y0)
    target = spec.target_legendre()
    deviation = np.abs(legendre.values - target)
    bad = (deviation > LEGENDRE_TOLERANCE * np.maximum(1.0, np.abs(target))) | (legendre.values <= 0)
    for index in np.flatnonzero(bad):
        t = float(scale.points[index])
        failing_points.append(t)
        failures.append(f"Legendre quantity {legendre.values[index]!r} differs from p={target[index]!r} at t={t!r}")

    rng = np.random.default_rng(seed)
    base = evaluate_functional(problem, y0)
    min_change = np.inf
    for _ in range(probes):
        perturbation = np.zeros(scale.size)
        perturbation[1:-1] = rng.uniform(-magnitude, magnitude, scale.size - 2)
        change = evaluate_functional(problem, GridFunction(scale, y0.values + perturbation)) - base
        min_change = min(min_change, change)
    if probes and min_change < -SYNTHESIS_DECREASE_TOLERANCE:
        failures.append(f"a perturbation decreases the functional by {-min_change:.3e}")

    report = SynthesisReport(
        el_residual=el.max_abs_residual,
        legendre=legendre,
        legendre_deviation=float(np.max(deviation)),
        probe_min_change=float(min_change) if probes else 0.0,
        failures=tuple(failures),
        failing_points=tuple(failing_points),
        seed=seed,
    )
    if report.passed:
        LOGGER.info("Synthesis on %s verified", scale.provenance)
    else:
        LOGGER.warning("Synthesis on %s failed: %s", scale.provenance, "; ".join(failures))
    return report
