"""Tests for the optimality conditions of composition problems."""

from numpy.testing import assert_allclose
import pytest

from tsvar.composition import (
    CompositionProblem,
    el_form_gap,
    el_residuals,
    evaluate_composition,
    is_quotient,
    quotient_el_residuals,
    solve_composition,
    transversality_residuals,
)
from tsvar.timescale import GridFunction, TimeScale, build_timescale
from tsvar.variational import InvalidProblemError


@pytest.fixture()
def quotient(three_points: TimeScale) -> CompositionProblem:
    """∫ t y^Δ Δt / ∫ (y^∇)² ∇t on {0, 1/2, 1} with y(0) = 0, y(1) = 1."""
    return CompositionProblem.create(three_points, ["t*v"], ["v^2"], "F1/F2", 0.0, 1.0)


@pytest.fixture()
def free_start() -> CompositionProblem:
    """A convex sum of a delta and a nabla integral with a free initial value."""
    scale = build_timescale("hZ(0.25, 0, 1)")
    return CompositionProblem.create(scale, ["v^2 + y^2"], ["(v - 1)^2"], "F1 + F2", None, 1.0)


def test_is_quotient(quotient: CompositionProblem, three_points: TimeScale) -> None:
    """Test the detection of the quotient shape."""
    assert is_quotient(quotient)
    assert not is_quotient(CompositionProblem.create(three_points, ["t*v"], ["v^2"], "F2/F1", 0.0, 1.0))
    assert not is_quotient(CompositionProblem.create(three_points, ["t*v"], ["v^2"], "F1*F2", 0.0, 1.0))


def test_quotient_formulas_match_general_forms(quotient: CompositionProblem, three_points: TimeScale) -> None:
    """Test that the explicit quotient equations agree with the general ξ/χ forms off an extremal."""
    y = GridFunction(three_points, [0.0, 0.3, 1.0])
    general = el_residuals(quotient, y)
    explicit = quotient_el_residuals(quotient, y)
    assert_allclose(explicit.nabla_form.values, general.nabla_form.values, atol=1e-12)
    assert_allclose(explicit.delta_form.values, general.delta_form.values, atol=1e-12)
    assert explicit.c_nabla == pytest.approx(general.c_nabla)
    assert explicit.c_delta == pytest.approx(general.c_delta)
    _, state = evaluate_composition(quotient, y)
    assert explicit.F1 == pytest.approx(state.F[0])
    assert explicit.F2 == pytest.approx(state.F[1])


def test_quotient_formulas_at_extremal(quotient: CompositionProblem) -> None:
    """Test that both explicit forms are constant at the solved extremal."""
    extremal = solve_composition(quotient)
    explicit = quotient_el_residuals(quotient, extremal.y)
    assert explicit.nabla_form.max_abs() < 1e-8
    assert explicit.delta_form.max_abs() < 1e-8


def test_quotient_formulas_need_quotient(three_points: TimeScale) -> None:
    """Test that other outer functions are refused."""
    problem = CompositionProblem.create(three_points, ["t*v"], ["v^2"], "F1*F2", 0.0, 1.0)
    with pytest.raises(InvalidProblemError):
        quotient_el_residuals(problem, GridFunction(three_points, [0.0, 0.5, 1.0]))


def test_form_gap_vanishes_on_exact_scale(half_steps: TimeScale) -> None:
    """Test that the two forms coincide everywhere on a regular scale."""
    problem = CompositionProblem.create(half_steps, ["v^2"], ["t*v"], "F1 + F2")
    y = GridFunction.from_callable(half_steps, lambda t: t**2)
    gap = el_form_gap(problem, y)
    assert gap.domain == (1, half_steps.size)
    assert gap.max_abs() == 0.0


def test_form_gap_at_block_end(pab: TimeScale) -> None:
    """Test that the gap appears only where the modelled continuum jumps: χ(1) − χ(2) at t = 1."""
    problem = CompositionProblem.create(pab, ["v^2"], ["t*v"], "F1 + F2")
    y = GridFunction.from_callable(pab, lambda t: t**2)
    gap = el_form_gap(problem, y)
    assert gap.domain == (1, 6)
    assert gap.at(1.0) == pytest.approx(-1.0)
    for t in (0.5, 2.0, 2.5, 3.0):
        assert gap.at(t) == 0.0


def test_transversality_free_start(free_start: CompositionProblem) -> None:
    """Test that the solved extremal satisfies the natural condition at the free end."""
    extremal = solve_composition(free_start)
    conditions = transversality_residuals(free_start, extremal.y)
    assert conditions.initial_free
    assert not conditions.terminal_free
    assert conditions.initial == pytest.approx(0.0, abs=1e-9)
    assert conditions.holds()
    assert el_residuals(free_start, extremal.y).holds()


def test_transversality_violated(free_start: CompositionProblem) -> None:
    """Test that a trajectory which is not stationary at the free end fails."""
    y = GridFunction.from_callable(free_start.scale, lambda t: t)
    conditions = transversality_residuals(free_start, y)
    assert abs(conditions.initial) > 1e-3
    assert not conditions.holds()


@pytest.mark.parametrize("spec", ["points(0, 1, 1.5)", "qZ(2, 0..3)", "Pab(1, 1, 2, 0.5)"])
def test_transversality_at_both_ends(spec: str) -> None:
    """Test that both natural conditions are evaluated on every kind of scale."""
    scale = build_timescale(spec)
    problem = CompositionProblem.create(scale, ["v^2"], [], "F1")
    line = GridFunction.from_callable(scale, lambda t: t)
    conditions = transversality_residuals(problem, line)
    assert conditions.initial == pytest.approx(2.0)
    assert conditions.terminal == pytest.approx(2.0)
    assert not conditions.holds()
    flat = transversality_residuals(problem, GridFunction.constant(scale, 0.5))
    assert flat.initial == 0.0
    assert flat.terminal == 0.0
    assert flat.holds()
