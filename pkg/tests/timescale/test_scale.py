"""Tests for time scale construction and jump data."""

import numpy as np
from numpy.testing import assert_allclose
import pytest

from tsvar.timescale import (
    OffScaleError,
    PointClass,
    ScaleKind,
    ScaleSpecError,
    TimeScale,
    build_timescale,
    jump_data,
    modelled_jump_data,
    parse_scale_spec,
    point_classes,
    scale_properties,
)


def test_parse_scale_spec() -> None:
    """Test parsing the textual scale recipes."""
    spec = parse_scale_spec("hZ(0.5, 0, 3)")
    assert spec.family == "hZ"
    assert spec.params == (0.5, 0.0, 3.0)
    assert str(spec) == "hZ(0.5, 0, 3)"
    assert parse_scale_spec("qZ(2, 0..3)").params == (2.0, 0.0, 3.0)
    assert parse_scale_spec("qZ(2, [-1..2])").params == (2.0, -1.0, 2.0)


def test_build_families() -> None:
    """Test the points of every scale family."""
    assert_allclose(build_timescale("points(0, 0.5, 1)").points, [0.0, 0.5, 1.0])
    assert_allclose(build_timescale("hZ(0.5, 0, 3)").points, np.arange(7) * 0.5)
    assert_allclose(build_timescale("qZ(2, 0..3)").points, [1.0, 2.0, 4.0, 8.0])
    pab = build_timescale("Pab(1, 1, 2, 0.5)")
    assert pab.kind == ScaleKind.SAMPLED_DENSE
    assert_allclose(pab.points, [0.0, 0.5, 1.0, 2.0, 2.5, 3.0])
    assert pab.blocks == ((0.0, 1.0), (2.0, 3.0))


def test_hz_endpoint_is_exact() -> None:
    """Test that the last point of hZ is b itself, free of accumulated rounding."""
    scale = build_timescale("hZ(0.1, 0, 1)")
    assert scale.size == 11
    assert scale.b == 1.0


@pytest.mark.parametrize(
    "spec",
    [
        "hZ(0.3, 0, 1)",
        "hZ(-1, 0, 1)",
        "hZ(1, 2, 1)",
        "qZ(1, 0..3)",
        "qZ(2, 0.5..3)",
        "Pab(1, 1, 2, 0.3)",
        "Pab(1, 1, 0, 0.5)",
        "points(0, 1, 1)",
        "points(1)",
        "zZ(1, 0, 1)",
        "hZ(a, 0, 1)",
        "hZ 1 0 1",
    ],
)
def test_invalid_specs(spec: str) -> None:
    """Test that malformed recipes are rejected."""
    with pytest.raises(ScaleSpecError):
        build_timescale(spec)


def test_jumps_and_graininess(rng: np.random.Generator) -> None:
    """Test σ, ρ, μ and ν on random finite scales."""
    for _ in range(500):
        size = int(rng.integers(2, 12))
        points = float(rng.uniform(-5.0, 5.0)) + np.cumsum(rng.uniform(0.05, 2.0, size))
        scale = TimeScale(points)
        assert_allclose(scale.sigma[:-1], points[1:])
        assert scale.sigma[-1] == scale.b
        assert_allclose(scale.rho[1:], points[:-1])
        assert scale.rho[0] == scale.a
        assert_allclose(scale.mu, scale.sigma - points)
        assert_allclose(scale.nu, points - scale.rho)
        assert np.all(scale.mu[:-1] > 0)
        assert np.all(scale.nu[1:] > 0)
        # ρ(σ(t)) = t on T^κ and σ(ρ(t)) = t on T_κ
        after_sigma = np.searchsorted(points, scale.sigma)
        after_rho = np.searchsorted(points, scale.rho)
        assert_allclose(scale.rho[after_sigma[:-1]], points[:-1])
        assert_allclose(scale.sigma[after_rho[1:]], points[1:])
        properties = scale_properties(scale)
        assert properties.is_isolated
        assert properties.is_regular


def test_index_of(three_points: TimeScale) -> None:
    """Test point lookup with the membership tolerance."""
    assert three_points.index_of(0.5) == 1
    assert three_points.index_of(0.5 + 1e-14) == 1
    assert three_points.contains(1.0)
    assert not three_points.contains(0.25)
    with pytest.raises(OffScaleError):
        three_points.index_of(0.75)


def test_jump_data_sampled(pab: TimeScale) -> None:
    """Test the jump data of the finite point set."""
    data = jump_data(pab, 1.0)
    assert data.sigma == 2.0
    assert data.rho == 0.5
    assert data.mu == 1.0
    assert data.nu == 0.5
    assert PointClass.ISOLATED in data.classes
    end = jump_data(pab, 3.0)
    assert end.sigma == 3.0
    assert end.mu == 0.0
    assert end.classes == frozenset({PointClass.RIGHT_DENSE, PointClass.LEFT_SCATTERED})


def test_modelled_jump_data(pab: TimeScale) -> None:
    """Test the jumps of the continuum a sampled scale models."""
    inside = modelled_jump_data(pab, 0.5)
    assert inside.sigma == 0.5
    assert inside.rho == 0.5
    assert inside.mu == 0.0
    assert PointClass.DENSE in inside.classes
    block_end = modelled_jump_data(pab, 1.0)
    assert block_end.sigma == 2.0
    assert block_end.mu == 1.0
    assert block_end.classes == frozenset({PointClass.RIGHT_SCATTERED, PointClass.LEFT_DENSE})
    block_start = modelled_jump_data(pab, 2.0)
    assert block_start.rho == 1.0
    assert block_start.classes == frozenset({PointClass.LEFT_SCATTERED, PointClass.RIGHT_DENSE})


def test_scale_properties(pab: TimeScale, half_steps: TimeScale) -> None:
    """Test regularity of the sampled set and of the modelled continuum."""
    sampled = scale_properties(pab)
    assert sampled.is_isolated
    assert sampled.is_regular
    assert not sampled.modelled_regular
    exact = scale_properties(half_steps)
    assert exact.is_regular
    assert exact.modelled_regular


def test_scale_equality() -> None:
    """Test that scales compare by points and kind."""
    assert build_timescale("hZ(0.5, 0, 1)") == build_timescale("points(0, 0.5, 1)")
    assert hash(build_timescale("hZ(0.5, 0, 1)")) == hash(build_timescale("points(0, 0.5, 1)"))
    assert build_timescale("hZ(0.5, 0, 1)") != build_timescale("hZ(0.25, 0, 1)")


def test_endpoint_classes(three_points: TimeScale) -> None:
    """Test that the extreme points are dense on their outer side."""
    top = jump_data(three_points, 1.0)
    assert top.sigma == 1.0
    assert top.classes == frozenset({PointClass.RIGHT_DENSE, PointClass.LEFT_SCATTERED})
    bottom = jump_data(three_points, 0.0)
    assert bottom.rho == 0.0
    assert bottom.classes == frozenset({PointClass.RIGHT_SCATTERED, PointClass.LEFT_DENSE})
    middle = jump_data(three_points, 0.5)
    assert middle.classes == frozenset({PointClass.RIGHT_SCATTERED, PointClass.LEFT_SCATTERED, PointClass.ISOLATED})
    assert scale_properties(three_points).is_isolated


def test_point_classes_single_gap() -> None:
    """Test the classes on a two-point scale, where no interior point exists."""
    scale = build_timescale("points(0, 1)")
    assert point_classes(scale, 0) == frozenset({PointClass.RIGHT_SCATTERED, PointClass.LEFT_DENSE})
    assert point_classes(scale, 1) == frozenset({PointClass.RIGHT_DENSE, PointClass.LEFT_SCATTERED})
    assert scale_properties(scale).is_isolated
