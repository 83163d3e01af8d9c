"""Re-solving a composition problem on refined hZ grids to compare with the continuum."""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass, replace

from ..constants import ROOT_LOGGER_NAME
from ..timescale import ScaleSpec, TimeScale, build_timescale
from .problem import CompositionProblem
from .solver import Extremal, SolveOptions, solve_composition

LOGGER = logging.getLogger(ROOT_LOGGER_NAME)


@dataclass(frozen=True)
class RefinementRow:
    """The extremal found on one refined grid."""

    h: float
    scale: TimeScale
    extremal: Extremal
    samples: dict[float, float]


def refinement_sweep(
    problem: CompositionProblem, steps: Sequence[float], options: SolveOptions | None = None
) -> list[RefinementRow]:
    """Solve the problem on hZ(h, a, b) for each step h.

    Each row samples the extremal at the points of the original scale that lie on the refined grid.
    """
    rows = []
    for h in steps:
        refined = build_timescale(ScaleSpec("hZ", (float(h), problem.scale.a, problem.scale.b)))
        extremal = solve_composition(replace(problem, scale=refined), options)
        samples = {
            float(t): extremal.y.at(float(t)) for t in problem.scale.points if refined.contains(float(t))
        }
        LOGGER.info("Refinement h=%g: L=%.10g, lambda=%s", h, extremal.value, extremal.lam)
        rows.append(RefinementRow(float(h), refined, extremal, samples))
    return rows
