"""Conf test for tsvar."""

from pathlib import Path

import numpy as np
import pytest

from tsvar.timescale import TimeScale, build_timescale

PROBLEMS = Path(__file__).parent / "problems"


@pytest.fixture()
def rng() -> np.random.Generator:
    """Seeded random generator."""
    return np.random.default_rng(20240917)


@pytest.fixture()
def three_points() -> TimeScale:
    """The scale {0, 1/2, 1}."""
    return build_timescale("points(0, 0.5, 1)")


@pytest.fixture()
def half_steps() -> TimeScale:
    """The scale {0, 1/2, ..., 3}."""
    return build_timescale("hZ(0.5, 0, 3)")


@pytest.fixture()
def pab() -> TimeScale:
    """Two unit blocks of the continuum separated by unit gaps, sampled with step 1/2."""
    return build_timescale("Pab(1, 1, 2, 0.5)")


@pytest.fixture()
def problems() -> Path:
    """Directory of the problem files used by the tests."""
    return PROBLEMS
