"""Tests for solving composition problems."""

import math

import numpy as np
from numpy.testing import assert_allclose
import pytest

from tsvar.composition import (
    CompositionProblem,
    IsoConstraint,
    MissingConstraintError,
    Normality,
    Objective,
    SolveOptions,
    classify_extremal,
    el_residuals,
    initial_guesses,
    iso_residuals,
    refinement_sweep,
    solve_composition,
    start_multipliers,
)
from tsvar.timescale import GridFunction, TimeScale, build_timescale
from tsvar.variational import InvalidProblemError

PRODUCT_TABLE = [0.0, 2.0711875, 3.5139, 4.3281375, 4.5139, 4.0711875, 3.0]
DELTA_ONLY_TABLE = [0.0, 2.076, 3.5216, 4.3368, 4.5216, 4.076, 3.0]
NABLA_ONLY_TABLE = [0.0, 2.4942, 4.1907, 5.0895, 5.1907, 4.4942, 3.0]
REFINEMENT_STEPS = [2.0**-k for k in range(4, 9)]


@pytest.fixture()
def quotient(three_points: TimeScale) -> CompositionProblem:
    """∫ t y^Δ Δt / ∫ (y^∇)² ∇t on {0, 1/2, 1} with y(0) = 0, y(1) = 1."""
    return CompositionProblem.create(three_points, ["t*v"], ["v^2"], "F1/F2", 0.0, 1.0)


@pytest.fixture()
def constrained(three_points: TimeScale) -> CompositionProblem:
    """∫ (y^Δ)² Δt / ∫ t y^∇ ∇t subject to ∫ t y^∇ ∇t = 1."""
    iso = IsoConstraint.create([], ["t*v"], "G1", 1.0)
    return CompositionProblem.create(three_points, ["v^2"], ["t*v"], "F1/F2", 0.0, 1.0, iso)


def test_start_multipliers() -> None:
    """Test the sequence of start perturbations."""
    assert start_multipliers(1) == [0.0]
    assert start_multipliers(6) == [0.0, 1.0, -1.0, 2.0, -2.0, 4.0]


def test_initial_guesses(quotient: CompositionProblem) -> None:
    """Test that every start meets the boundary data and the first one is the interpolant."""
    guesses = initial_guesses(quotient, 4)
    assert len(guesses) == 4
    assert_allclose(guesses[0], [0.0, 0.5, 1.0])
    for guess in guesses:
        assert guess[0] == pytest.approx(0.0, abs=1e-15)
        assert guess[-1] == pytest.approx(1.0)


def test_quotient_maximum(quotient: CompositionProblem) -> None:
    """Test the local maximum of the quotient on three points."""
    extremal = solve_composition(quotient, SolveOptions(objective=Objective.MAX))
    assert extremal.y.at(0.5) == pytest.approx(1.0 - math.sqrt(2.0) / 2.0, abs=1e-9)
    assert extremal.value == pytest.approx((1.0 + math.sqrt(2.0)) / 8.0, abs=1e-12)
    assert extremal.lam is None
    assert extremal.normality is None
    assert el_residuals(quotient, extremal.y).holds()


def test_quotient_minimum(quotient: CompositionProblem) -> None:
    """Test the minimum of the quotient on three points."""
    extremal = solve_composition(quotient, SolveOptions(objective=Objective.MIN))
    assert extremal.y.at(0.5) == pytest.approx(1.0 + math.sqrt(2.0) / 2.0, abs=1e-9)
    assert extremal.value == pytest.approx((1.0 - math.sqrt(2.0)) / 8.0, abs=1e-12)
    assert extremal.residual_summary["el_nabla"] < 1e-8
    assert extremal.residual_summary["el_delta"] < 1e-8


def test_product_of_mixed_integrals(half_steps: TimeScale) -> None:
    """Test the product of two delta and one nabla integral on {0, 1/2, ..., 3}."""
    problem = CompositionProblem.create(half_steps, ["t*v", "v*(1 + t)"], ["v^2 + t"], "F1*F2*F3", 0.0, 3.0)
    extremal = solve_composition(problem)
    assert_allclose(extremal.y.values, PRODUCT_TABLE, atol=5e-4)
    assert extremal.F[1] == pytest.approx(3.0 + extremal.F[0])
    assert extremal.value == pytest.approx(float(np.prod(extremal.F)))


def test_product_delta_only(half_steps: TimeScale) -> None:
    """Test the variant with delta integrals only."""
    problem = CompositionProblem.create(half_steps, ["t*v", "v*(1 + t)", "v^2 + t"], [], "F1*F2*F3", 0.0, 3.0)
    extremal = solve_composition(problem)
    assert_allclose(extremal.y.values, DELTA_ONLY_TABLE, atol=5e-4)
    assert extremal.y.at(1.0) - 1.0 == pytest.approx(2.5216, abs=5e-4)


def test_product_nabla_only(half_steps: TimeScale) -> None:
    """Test the variant with nabla integrals only.

    The extremal has y(1) = 1 + Q with Q ≈ 3.1907.
    """
    problem = CompositionProblem.create(half_steps, [], ["t*v", "v*(1 + t)", "v^2 + t"], "F1*F2*F3", 0.0, 3.0)
    extremal = solve_composition(problem)
    assert_allclose(extremal.y.values, NABLA_ONLY_TABLE, atol=5e-4)


def test_isoperimetric(constrained: CompositionProblem) -> None:
    """Test the constrained quotient: y = (0, 0, 1) with λ = 6, a normal extremal."""
    extremal = solve_composition(constrained)
    assert_allclose(extremal.y.values, [0.0, 0.0, 1.0], atol=1e-10)
    assert extremal.lam == pytest.approx(6.0, abs=1e-9)
    assert extremal.normality == Normality.NORMAL
    assert extremal.residual_summary["constraint"] < 1e-10
    residuals = iso_residuals(constrained, extremal.y, 6.0)
    assert residuals.holds()
    assert residuals.constraint_value == pytest.approx(1.0)
    assert classify_extremal(constrained, extremal.y) == Normality.NORMAL


def test_abnormal_extremal(three_points: TimeScale) -> None:
    """Test that a constraint whose first variation is constant marks every trajectory abnormal."""
    iso = IsoConstraint.create(["v"], [], "G1", 1.0)
    problem = CompositionProblem.create(three_points, ["v^2"], [], "F1", 0.0, 1.0, iso)
    y = GridFunction(three_points, [0.0, 0.3, 1.0])
    assert classify_extremal(problem, y) == Normality.ABNORMAL


def test_missing_constraint(quotient: CompositionProblem) -> None:
    """Test that isoperimetric checks need a constraint."""
    extremal = solve_composition(quotient)
    with pytest.raises(MissingConstraintError):
        iso_residuals(quotient, extremal.y, 1.0)
    with pytest.raises(MissingConstraintError):
        classify_extremal(quotient, extremal.y)


def test_sampled_scale_is_not_solved(pab: TimeScale) -> None:
    """Test that sampled continua are checked but not solved."""
    problem = CompositionProblem.create(pab, ["v^2"], [], "F1", 0.0, 1.0)
    with pytest.raises(InvalidProblemError):
        solve_composition(problem)


def test_invalid_family(three_points: TimeScale) -> None:
    """Test the family invariants."""
    with pytest.raises(InvalidProblemError):
        CompositionProblem.create(three_points, [], [], "1", 0.0, 1.0)
    with pytest.raises(InvalidProblemError):
        CompositionProblem.create(build_timescale("points(0, 1)"), ["v^2"], [], "F1")


def _grid_sums(h: float) -> tuple[float, float]:
    """Σ h t and Σ h t² − (Σ h t)² over the left points of hZ(h, 0, 1)."""
    return (1.0 - h) / 2.0, (1.0 - h) * (1.0 + h) / 12.0


@pytest.mark.slow()
def test_quotient_refinement(quotient: CompositionProblem) -> None:
    """Test that the minimum on hZ(h, 0, 1) approaches (3 − 2√3)/12 and the parabola it is attained at."""
    rows = refinement_sweep(quotient, REFINEMENT_STEPS, SolveOptions(objective=Objective.MIN))
    continuum = (3.0 - 2.0 * math.sqrt(3.0)) / 12.0
    for row in rows:
        # y^Δ = a t + b on the grid with a² D + 2 a Σht − 1 = 0 and value 1/(2a)
        first, spread = _grid_sums(row.h)
        slope = -(first + math.sqrt(first * first + spread)) / spread
        assert row.extremal.value == pytest.approx(1.0 / (2.0 * slope), abs=1e-9)
    errors = [abs(row.extremal.value - continuum) for row in rows]
    assert all(later < earlier for earlier, later in zip(errors, errors[1:]))
    assert errors[-1] < 5e-3
    finest = rows[-1]
    assert finest.scale.size == 257
    assert set(finest.samples) == {0.0, 0.5, 1.0}
    t = finest.scale.points
    parabola = -(3.0 + 2.0 * math.sqrt(3.0)) * t * t + (4.0 + 2.0 * math.sqrt(3.0)) * t
    assert np.max(np.abs(finest.extremal.y.values - parabola)) < 1e-2


@pytest.mark.slow()
def test_constrained_refinement(constrained: CompositionProblem) -> None:
    """Test that the multiplier approaches 8 and the extremal approaches 3t² − 2t on hZ(h, 0, 1)."""
    rows = refinement_sweep(constrained, REFINEMENT_STEPS)
    multipliers = []
    for row in rows:
        lam = row.extremal.lam
        assert lam is not None
        # the grid solution is y = 3(t² + th)/(1 + h) − 2t with λ = (8 + 2h)/(1 + h)
        assert lam == pytest.approx((8.0 + 2.0 * row.h) / (1.0 + row.h), abs=1e-7)
        t = row.scale.points
        assert_allclose(row.extremal.y.values, 3.0 * (t * t + t * row.h) / (1.0 + row.h) - 2.0 * t, atol=1e-8)
        multipliers.append(lam)
    errors = [abs(lam - 8.0) for lam in multipliers]
    assert all(later < earlier for earlier, later in zip(errors, errors[1:]))
    # the error is linear in h, so one extrapolation step removes it
    assert abs(2.0 * multipliers[-1] - multipliers[-2] - 8.0) < 1e-2
    t = rows[-1].scale.points
    assert np.max(np.abs(rows[-1].extremal.y.values - (3.0 * t * t - 2.0 * t))) < 1e-2
