"""Problem files: YAML documents with one primary section and optional options."""

from __future__ import annotations

import logging
from collections.abc import Iterator
from dataclasses import dataclass
from enum import StrEnum
from pathlib import Path
from typing import Literal

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .. import TsvarError
from ..composition import CompositionProblem, IntegralFamily, IsoConstraint, Objective
from ..constants import ROOT_LOGGER_NAME
from ..expr import ExprSyntaxError, evaluate, parse
from ..inverse import IntegroDiffEquation, SynthesisSpec
from ..timescale import GridFunction, TimeScale, build_timescale
from ..variational import Flavor, VariationalProblem

LOGGER = logging.getLogger(ROOT_LOGGER_NAME)

PRIMARY_SECTIONS = ("variational", "composition", "synthesis", "helmholtz")


class ProblemFileError(TsvarError):
    """A problem file cannot be read or does not match the schema."""

    def __init__(self, path: Path | str, reason: str, location: str | None = None) -> None:
        """Create a ProblemFileError instance."""
        self.path = str(path)
        self.reason = reason
        self.location = location
        where = f" at {location}" if location else ""
        super().__init__(f"{path}{where}: {reason}")


class Section(BaseModel):
    """Base of all file sections: unknown keys are rejected."""

    model_config = ConfigDict(extra="forbid", populate_by_name=True)


Trajectory = str | list[float]


class VariationalSection(Section):
    """A single-integrand problem."""

    scale: str
    lagrangian: str
    flavor: Flavor = Flavor.DELTA
    y_a: float | None = None
    y_b: float | None = None
    y: Trajectory | None = None


class IsoSection(Section):
    """An isoperimetric constraint P(G1, ...) = d."""

    delta: list[str] = Field(default_factory=list, alias="delta_g")
    nabla: list[str] = Field(default_factory=list, alias="nabla_g")
    P: str
    d: float


class CompositionSection(Section):
    """A composition problem H(F1, ...)."""

    scale: str
    delta: list[str] = Field(default_factory=list, alias="delta_f")
    nabla: list[str] = Field(default_factory=list, alias="nabla_f")
    H: str
    y_a: float | None = None
    y_b: float | None = None
    objective: Objective | None = None
    iso: IsoSection | None = None
    y: Trajectory | None = None
    lam: float | None = Field(default=None, alias="lambda")


class SynthesisSection(Section):
    """Data of a Lagrangian synthesis."""

    scale: str
    P: str = "0"
    q: str = "0"
    w: str = "0"
    p: str
    C: float = 0.0
    R0: float
    y0: Trajectory | None = None


class HelmholtzSection(Section):
    """An integro-differential equation H[y] + ∫ G[y] = const."""

    scale: str
    H: str
    G: str
    trials: int | None = Field(default=None, ge=1)
    seed: int | None = None


class OutputFormat(StrEnum):
    """Report formats."""

    TEXT = "text"
    JSON = "json"
    CSV = "csv"


class OptionsSection(Section):
    """Global overrides; the command line takes precedence."""

    format: OutputFormat | None = None
    tolerance: float | None = Field(default=None, gt=0)
    seed: int | None = None
    multistart: int | None = Field(default=None, ge=1)
    objective: Objective | None = None
    refine: list[float] | None = None
    expect: Literal["el", "not-el"] | None = None


class ProblemDocument(Section):
    """The whole file."""

    variational: VariationalSection | None = None
    composition: CompositionSection | None = None
    synthesis: SynthesisSection | None = None
    helmholtz: HelmholtzSection | None = None
    options: OptionsSection = Field(default_factory=OptionsSection)

    @model_validator(mode="after")
    def _one_primary(self) -> ProblemDocument:
        present = [name for name in PRIMARY_SECTIONS if getattr(self, name) is not None]
        if len(present) != 1:
            raise ValueError(f"exactly one of {', '.join(PRIMARY_SECTIONS)} is required, found {present or 'none'}")
        return self


@dataclass(frozen=True)
class ProblemFile:
    """A loaded problem file with its expressions parsed and its objects built."""

    path: Path
    kind: str
    scale: TimeScale
    problem: VariationalProblem | CompositionProblem | SynthesisSpec | IntegroDiffEquation
    options: OptionsSection
    y: GridFunction | None = None
    lam: float | None = None
    trials: int | None = None
    seed: int | None = None


def _location(loc: tuple[int | str, ...]) -> str:
    path = ""
    for part in loc:
        path += f"[{part}]" if isinstance(part, int) else (f".{part}" if path else str(part))
    return path


def _expression_location(data: object, source: str, path: str) -> str | None:
    """Find the key holding the expression text."""
    if isinstance(data, str):
        return path if data.strip() == source.strip() else None
    children: Iterator[tuple[str, object]]
    if isinstance(data, dict):
        children = ((f"{path}.{key}", value) for key, value in data.items())
    elif isinstance(data, list):
        children = ((f"{path}[{index}]", value) for index, value in enumerate(data))
    else:
        return None
    for child_path, value in children:
        found = _expression_location(value, source, child_path)
        if found is not None:
            return found
    return None


def read_document(path: Path) -> ProblemDocument:
    """Read and validate the YAML document."""
    try:
        with path.open(encoding="utf-8") as stream:
            data = yaml.safe_load(stream)
    except FileNotFoundError as error:
        raise ProblemFileError(path, "file not found") from error
    except yaml.MarkedYAMLError as error:
        mark = error.problem_mark
        location = f"line {mark.line + 1}, column {mark.column + 1}" if mark is not None else None
        raise ProblemFileError(path, str(error.problem), location) from error
    except yaml.YAMLError as error:
        raise ProblemFileError(path, str(error)) from error
    if not isinstance(data, dict):
        raise ProblemFileError(path, "the document must be a mapping of sections")
    try:
        return ProblemDocument.model_validate(data)
    except ValidationError as error:
        first = error.errors()[0]
        raise ProblemFileError(path, first["msg"], _location(tuple(first["loc"])) or None) from error


def trajectory_on(scale: TimeScale, value: Trajectory) -> GridFunction:
    """Sample an expression in t on the scale, or wrap a list of values."""
    if isinstance(value, str):
        values = evaluate(parse(value, ("t",)), {"t": scale.points})
        return GridFunction(scale, np.broadcast_to(np.asarray(values, dtype=float), scale.points.shape))
    if len(value) != scale.size:
        raise ValueError(f"{len(value)} values given for {scale.size} points")
    return GridFunction(scale, np.asarray(value, dtype=float))


def _build(path: Path, document: ProblemDocument, kind: str) -> ProblemFile:
    options = document.options
    match kind:
        case "variational":
            section = document.variational
            assert section is not None
            scale = build_timescale(section.scale)
            variational = VariationalProblem.create(scale, section.lagrangian, section.flavor, section.y_a, section.y_b)
            y = None if section.y is None else trajectory_on(scale, section.y)
            return ProblemFile(path, kind, scale, variational, options, y)
        case "composition":
            composition_section = document.composition
            assert composition_section is not None
            scale = build_timescale(composition_section.scale)
            iso = None
            if composition_section.iso is not None:
                constraint = composition_section.iso
                iso = IsoConstraint.create(constraint.delta, constraint.nabla, constraint.P, constraint.d)
            family = IntegralFamily.create(
                composition_section.delta, composition_section.nabla, composition_section.H, "F"
            )
            composition = CompositionProblem(scale, family, composition_section.y_a, composition_section.y_b, iso)
            y = None if composition_section.y is None else trajectory_on(scale, composition_section.y)
            if options.objective is None and composition_section.objective is not None:
                options = options.model_copy(update={"objective": composition_section.objective})
            return ProblemFile(path, kind, scale, composition, options, y, composition_section.lam)
        case "synthesis":
            synthesis_section = document.synthesis
            assert synthesis_section is not None
            scale = build_timescale(synthesis_section.scale)
            y0 = None if synthesis_section.y0 is None else trajectory_on(scale, synthesis_section.y0)
            spec = SynthesisSpec.create(
                scale,
                synthesis_section.p,
                synthesis_section.R0,
                P=synthesis_section.P,
                q=synthesis_section.q,
                w=synthesis_section.w,
                C=synthesis_section.C,
                y0=y0,
            )
            return ProblemFile(path, kind, scale, spec, options)
        case _:
            helmholtz_section = document.helmholtz
            assert helmholtz_section is not None
            scale = build_timescale(helmholtz_section.scale)
            ide = IntegroDiffEquation.create(helmholtz_section.H, helmholtz_section.G)
            return ProblemFile(
                path, kind, scale, ide, options, trials=helmholtz_section.trials, seed=helmholtz_section.seed
            )


def load_problem(path: Path | str) -> ProblemFile:
    """Load a problem file, parse its expressions and build the problem it describes."""
    path = Path(path)
    document = read_document(path)
    kind = next(name for name in PRIMARY_SECTIONS if getattr(document, name) is not None)
    try:
        problem_file = _build(path, document, kind)
    except ExprSyntaxError as error:
        section = getattr(document, kind).model_dump(by_alias=True)
        location = _expression_location(section, error.source, kind) if error.source else None
        raise ProblemFileError(path, str(error), location or kind) from error
    except (TsvarError, ValueError) as error:
        raise ProblemFileError(path, str(error), kind) from error
    LOGGER.debug("Loaded %s problem from %s on %s", kind, path, problem_file.scale.provenance)
    return problem_file
