"""Tests for synthesizing Lagrangians with a prescribed Legendre quantity."""

import dataclasses

import numpy as np
from numpy.testing import assert_allclose
import pytest

from tsvar.inverse import (
    SynthesisError,
    SynthesisSpec,
    recursion_coefficients,
    solve_R_recursion,
    synthesize_lagrangian,
    verify_synthesis,
)
from tsvar.timescale import GridFunction, TimeScale, build_timescale, ts_exponential
from tsvar.variational import Flavor, VariationalProblem, el_integral_residual

SCALES = ["hZ(0.5, 0, 3)", "hZ(0.25, 0, 2)", "hZ(1, 0, 5)", "qZ(2, 0..4)", "qZ(1.5, 0..5)"]


def graininess_text(scale: TimeScale) -> str:
    """μ(t) as an expression in t."""
    if scale.provenance.startswith("qZ"):
        q = float(scale.points[1] / scale.points[0])
        return f"({q!r} - 1)*t"
    return repr(float(scale.mu[0]))


def test_random_family(rng: np.random.Generator) -> None:
    """Test synthesis over random data where R ≡ κμ/2 is known in closed form."""
    for case in range(100):
        scale = build_timescale(SCALES[case % len(SCALES)])
        mu = graininess_text(scale)
        kappa = rng.uniform(0.5, 2.0)
        b1, b2, b3 = rng.uniform(-1.0, 1.0), rng.uniform(0.1, 1.0), rng.uniform(-0.1, 0.1)
        c = rng.uniform(-0.1, 0.1)
        spec = SynthesisSpec.create(
            scale,
            f"{mu}*({kappa!r} + {mu}*2*{b2!r}*(1 + t^2))",
            kappa * float(scale.mu[0]) / 2.0,
            P=f"{b1!r}*sin(t)*y + {b2!r}*(1 + t^2)*y^2 + {b3!r}*y^3",
            q=f"{c!r}*t*y^2",
            w="0.05*y*v",
            C=rng.uniform(-1.0, 1.0),
            y0=GridFunction(scale, rng.uniform(-1.0, 1.0, scale.size)),
        )
        lagrangian = synthesize_lagrangian(spec)
        report = verify_synthesis(lagrangian, spec, probes=16, seed=case)
        assert report.passed, report.failures
        assert_allclose(lagrangian.R, kappa * scale.mu[: scale.size - 1] / 2.0, rtol=1e-9)
        assert report.legendre_deviation < 1e-10 * max(1.0, float(np.max(spec.target_legendre())))


def test_constant_target() -> None:
    """Test p ≡ 2 on the integers: R0 = 1 keeps R ≡ 1 and R0 = 1/2 makes R alternate."""
    scale = build_timescale("hZ(1, 0, 4)")
    constant = synthesize_lagrangian(SynthesisSpec.create(scale, "2", 1.0))
    assert constant.R.tolist() == [1.0, 1.0, 1.0, 1.0]
    alternating = synthesize_lagrangian(SynthesisSpec.create(scale, "2", 0.5))
    assert_allclose(alternating.R, [0.5, 1.5, 0.5, 1.5])
    spec = SynthesisSpec.create(scale, "2", 0.5)
    assert verify_synthesis(alternating, spec).passed


def test_recursion_on_dyadic_steps() -> None:
    """Test that r = −2/h and the exponential of r alternates exactly between 1 and −1."""
    for h in (0.5, 0.25, 1.0):
        scale = build_timescale(f"hZ({h!r}, 0, 3)")
        spec = SynthesisSpec.create(scale, "1", 0.5)
        r, s = recursion_coefficients(spec)
        assert_allclose(r.values, -2.0 / h)
        assert s.domain == (0, scale.size - 2)
        exponential = ts_exponential(scale, r, scale.a)
        assert exponential.values.tolist() == [(-1.0) ** k for k in range(exponential.values.size)]


def test_recursion_identity(rng: np.random.Generator) -> None:
    """Test R + μ(2q_y + μP_yy + R^σ/μ^σ) = p on [a,b]^κ²."""
    scale = build_timescale("qZ(2, 0..4)")
    spec = SynthesisSpec.create(scale, "t + 1", rng.uniform(0.1, 1.0), P="y^2*cos(t)", q="y*t")
    R = solve_R_recursion(spec).values
    mu = scale.mu
    inner = spec.inner
    t = scale.points[:inner]
    lhs = R[:inner] + mu[:inner] * (2.0 * t + mu[:inner] * 2.0 * np.cos(t) + R[1 : inner + 1] / mu[1 : inner + 1])
    assert_allclose(lhs, t + 1.0, rtol=1e-10)


def test_extremal_with_free_constant(half_steps: TimeScale) -> None:
    """Test that y0 is an extremal with the constant of the integrated equation equal to C."""
    y0 = GridFunction.from_callable(half_steps, np.sin)
    spec = SynthesisSpec.create(half_steps, "0.5", 0.2, P="y^2 + t*y", C=0.75, y0=y0)
    lagrangian = synthesize_lagrangian(spec)
    problem = VariationalProblem(half_steps, lagrangian, Flavor.DELTA, y0.values[0], y0.values[-1])
    report = el_integral_residual(problem, y0)
    assert report.is_extremal
    assert report.constant_c == pytest.approx(0.75)
    assert_allclose(lagrangian.Q_func.values[0], 0.75)


def test_tampered_lagrangian(half_steps: TimeScale) -> None:
    """Test that a changed R(a) is reported at t = a only."""
    spec = SynthesisSpec.create(half_steps, "1", 0.25)
    lagrangian = synthesize_lagrangian(spec)
    R = lagrangian.R.copy()
    R[0] += 1e-3
    report = verify_synthesis(dataclasses.replace(lagrangian, R=R), spec)
    assert not report.passed
    assert report.failing_points == (half_steps.a,)


def test_lagrangian_undefined_at_end(half_steps: TimeScale) -> None:
    """Test that the Lagrangian is refused at t = b."""
    lagrangian = synthesize_lagrangian(SynthesisSpec.create(half_steps, "1", 0.25))
    with pytest.raises(SynthesisError):
        lagrangian.partials(np.array([half_steps.b]), np.zeros(1), np.zeros(1))


@pytest.mark.parametrize(
    ("scale", "p"),
    [
        ("hZ(0.5, 0, 2)", "t - 1"),
        ("hZ(0.5, 0, 2)", "0"),
        ("Pab(1, 1, 2, 0.5)", "1"),
        ("points(0, 1)", "1"),
    ],
)
def test_invalid_spec(scale: str, p: str) -> None:
    """Test that a non-positive target or an unsuitable scale is rejected."""
    with pytest.raises(SynthesisError):
        SynthesisSpec.create(build_timescale(scale), p, 1.0)


def test_partial_y0_rejected(half_steps: TimeScale) -> None:
    """Test that y0 must be defined on all points."""
    y0 = GridFunction(half_steps, np.zeros(half_steps.size - 1), 0, half_steps.size - 1)
    with pytest.raises(SynthesisError):
        SynthesisSpec.create(half_steps, "1", 0.5, y0=y0)
