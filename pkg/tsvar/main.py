"""Command line front-end of tsvar."""

from __future__ import annotations

import argparse
import logging
import sys
import time
from collections.abc import Callable, Sequence
from contextlib import suppress
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Final, TypeVar

from colorlog import ColoredFormatter

from . import TsvarError, __version__
from .composition import (
    CompositionProblem,
    Extremal,
    NoConvergentStartError,
    Objective,
    SolveOptions,
    classify_extremal,
    el_form_gap,
    el_residuals,
    is_quotient,
    iso_residuals,
    quotient_el_residuals,
    refinement_sweep,
    solve_composition,
    transversality_residuals,
)
from .constants import ROOT_LOGGER_NAME
from .inverse import (
    HelmholtzStatus,
    IntegroDiffEquation,
    SynthesisSpec,
    helmholtz_check,
    synthesize_lagrangian,
    verify_synthesis,
)
from .report import Report, jump_table, plain, render, scale_summary
from .settings import settings
from .storage import OptionsSection, OutputFormat, ProblemFile, ProblemFileError, load_problem
from .timescale import GridFunction, ScaleKind, TimeScale, build_timescale
from .variational import (
    ConvergenceError,
    Flavor,
    VariationalProblem,
    el_integral_residual,
    evaluate_functional,
    nabla_el_residual,
    solve_direct,
)

FORMAT_DATE: Final = "%Y-%m-%d"
FORMAT_TIME: Final = "%H:%M:%S"
FORMAT_DATETIME: Final = f"{FORMAT_DATE} {FORMAT_TIME}"
MAX_LOG_FILESIZE = 1000000 * 10  # 10 MB

EXIT_OK: Final = 0
EXIT_INPUT_ERROR: Final = 1
EXIT_CHECK_FAILED: Final = 2

LOGGER = logging.getLogger(ROOT_LOGGER_NAME)

T = TypeVar("T")


def first_given(*values: T | None, default: T) -> T:
    """Get the first value that is not None."""
    return next((value for value in values if value is not None), default)


def setup_logger(log_filename: str | None, level: str = "WARNING") -> logging.Logger:
    """Initialize logger."""
    log_fmt = "%(asctime)s.%(msecs)03d %(levelname)s (%(threadName)s) [%(name)s] %(message)s"

    # reports go to stdout, so the console handler writes to stderr
    logging.basicConfig(level=logging.WARNING, stream=sys.stderr)

    colorfmt = f"%(log_color)s{log_fmt}%(reset)s"
    logging.getLogger().handlers[0].setFormatter(
        ColoredFormatter(
            colorfmt,
            datefmt=FORMAT_DATETIME,
            reset=True,
            log_colors={
                "DEBUG": "cyan",
                "INFO": "green",
                "WARNING": "yellow",
                "ERROR": "red",
                "CRITICAL": "red",
            },
        ),
    )

    # numpy and friends report through warnings.warn
    logging.captureWarnings(True)

    logger = logging.getLogger()
    if log_filename:
        file_handler = RotatingFileHandler(log_filename, maxBytes=MAX_LOG_FILESIZE, backupCount=1)
        # rotate log at each start
        with suppress(OSError):
            file_handler.doRollover()
        file_handler.setFormatter(logging.Formatter(log_fmt, datefmt=FORMAT_DATETIME))
        logger.addHandler(file_handler)

    logging.getLogger(ROOT_LOGGER_NAME).setLevel(level)
    return logger


class Context:
    """Resolved options of one invocation: command line over file options over settings."""

    def __init__(self, args: argparse.Namespace, problem_file: ProblemFile | None) -> None:
        """Create a Context instance."""
        options = problem_file.options if problem_file is not None else OptionsSection()
        self.args = args
        self.problem_file = problem_file
        self.output_format: str = str(first_given(args.format, options.format, default=OutputFormat.TEXT))
        self.tolerance: float | None = args.tol if args.tol is not None else options.tolerance
        self.seed: int = first_given(args.seed, options.seed, default=settings.SEED)
        self.multistart: int = first_given(args.multistart, options.multistart, default=settings.MULTISTART)
        self.objective = Objective(first_given(args.objective, options.objective, default=Objective.MIN))
        self.refine: list[float] = first_given(args.refine, options.refine, default=[])
        self.expect: str | None = args.expect if args.expect is not None else options.expect

    def tolerance_for(self, scale: TimeScale) -> float:
        """The constancy tolerance of the checks on a scale."""
        if self.tolerance is not None:
            return self.tolerance
        return settings.DENSE_EL_TOLERANCE if scale.kind == ScaleKind.SAMPLED_DENSE else settings.EL_TOLERANCE

    def solve_options(self, scale: TimeScale) -> SolveOptions:
        """Solver settings of the composition engine."""
        return SolveOptions(
            objective=self.objective,
            multistart=self.multistart,
            max_iter=settings.NEWTON_MAX_ITER,
            tolerance=settings.NEWTON_GRADIENT_TOLERANCE,
            el_tolerance=self.tolerance_for(scale),
        )


def _grid_rows(**columns: GridFunction) -> list[dict]:
    """One row per point of the union of the domains, blank where a function is undefined."""
    first = next(iter(columns.values()))
    scale = first.scale
    lo = min(column.lo for column in columns.values())
    hi = max(column.hi for column in columns.values())
    rows = []
    for index in range(lo, hi):
        row: dict = {"t": float(scale.points[index])}
        for name, column in columns.items():
            row[name] = column.at_index(index) if column.lo <= index < column.hi else None
        rows.append(row)
    return rows


def _kind(context: Context, *kinds: str) -> ProblemFile:
    problem_file = context.problem_file
    assert problem_file is not None
    if problem_file.kind not in kinds:
        raise ProblemFileError(
            problem_file.path, f"{context.args.command} needs a {' or '.join(kinds)} section", problem_file.kind
        )
    return problem_file


def _extremal_values(report: Report, extremal: Extremal) -> None:
    report.values["L"] = extremal.value
    if extremal.lam is not None:
        report.values["lambda"] = extremal.lam
    if extremal.normality is not None:
        report.values["normality"] = str(extremal.normality)
    for index, value in enumerate(extremal.F, start=1):
        report.values[f"F{index}"] = float(value)
    report.values["start"] = extremal.start
    report.values["iterations"] = extremal.iterations
    for key, value in extremal.residual_summary.items():
        report.values[f"residual_{key}"] = value


def _composition_trajectory(context: Context, problem: CompositionProblem) -> tuple[GridFunction, float | None]:
    problem_file = context.problem_file
    assert problem_file is not None
    if problem_file.y is not None:
        return problem_file.y, problem_file.lam
    extremal = solve_composition(problem, context.solve_options(problem.scale))
    return extremal.y, extremal.lam


def _variational_trajectory(context: Context, problem: VariationalProblem) -> GridFunction:
    problem_file = context.problem_file
    assert problem_file is not None
    if problem_file.y is not None:
        return problem_file.y
    return solve_direct(problem, max_iter=settings.NEWTON_MAX_ITER, tolerance=settings.NEWTON_GRADIENT_TOLERANCE)


def analyze_scale(context: Context, report: Report) -> None:
    """Summarize a scale and tabulate its jump operators."""
    if context.problem_file is not None:
        scale = context.problem_file.scale
    else:
        scale = build_timescale(context.args.target)
    report.scale = scale_summary(scale)
    report.tables["jumps"] = jump_table(scale)


def solve(context: Context, report: Report) -> None:
    """Solve a variational or composition problem."""
    problem_file = _kind(context, "variational", "composition")
    problem = problem_file.problem
    if isinstance(problem, VariationalProblem):
        y = solve_direct(problem, max_iter=settings.NEWTON_MAX_ITER, tolerance=settings.NEWTON_GRADIENT_TOLERANCE)
        report.values["L"] = evaluate_functional(problem, y)
        report.tables["extremal"] = _grid_rows(y=y)
        return
    assert isinstance(problem, CompositionProblem)
    options = context.solve_options(problem.scale)
    extremal = solve_composition(problem, options)
    report.values["objective"] = str(options.objective)
    _extremal_values(report, extremal)
    report.tables["extremal"] = _grid_rows(y=extremal.y)
    if context.refine:
        rows = []
        for row in refinement_sweep(problem, context.refine, options):
            entry: dict = {"h": row.h, "L": row.extremal.value, "lambda": row.extremal.lam}
            entry.update({f"y({t:g})": value for t, value in row.samples.items()})
            rows.append(entry)
        report.tables["refinement"] = rows


def check_el(context: Context, report: Report) -> None:
    """Check the Euler-Lagrange equations along the given or solved trajectory."""
    problem_file = _kind(context, "variational", "composition")
    problem = problem_file.problem
    tolerance = context.tolerance_for(problem_file.scale)
    if isinstance(problem, VariationalProblem):
        y = _variational_trajectory(context, problem)
        check = el_integral_residual if problem.flavor == Flavor.DELTA else nabla_el_residual
        el = check(problem, y, tolerance)
        report.values.update(
            {
                "c": el.constant_c,
                "max_abs_residual": el.max_abs_residual,
                "tolerance": el.tolerance,
                "domain": el.domain,
            }
        )
        report.tables["trajectory"] = _grid_rows(y=y)
        columns = {"residual": el.residual}
        if el.legendre is not None:
            columns["legendre"] = el.legendre
            report.values["legendre_strict"] = el.legendre_strict
        report.tables["euler_lagrange"] = _grid_rows(**columns)
        report.ok = el.is_extremal
        return
    assert isinstance(problem, CompositionProblem)
    y, _ = _composition_trajectory(context, problem)
    forms = el_residuals(problem, y)
    report.values.update(
        {
            "c_nabla": forms.c_nabla,
            "c_delta": forms.c_delta,
            "max_abs_residual": forms.max_abs,
            "tolerance": tolerance,
        }
    )
    report.tables["trajectory"] = _grid_rows(y=y)
    report.tables["euler_lagrange"] = _grid_rows(nabla_form=forms.nabla_form, delta_form=forms.delta_form)
    gap = el_form_gap(problem, y)
    report.values["form_gap"] = gap.max_abs()
    if problem.scale.kind == ScaleKind.SAMPLED_DENSE:
        report.tables["form_gap"] = _grid_rows(gap=gap)
    if is_quotient(problem):
        quotient = quotient_el_residuals(problem, y)
        report.values["quotient_max_abs_residual"] = max(quotient.nabla_form.max_abs(), quotient.delta_form.max_abs())
    report.ok = forms.holds(tolerance)


def transversality(context: Context, report: Report) -> None:
    """Check the natural boundary conditions of free endpoints."""
    problem_file = _kind(context, "composition")
    problem = problem_file.problem
    assert isinstance(problem, CompositionProblem)
    y, _ = _composition_trajectory(context, problem)
    residuals = transversality_residuals(problem, y)
    report.values.update(
        {
            "initial": residuals.initial,
            "terminal": residuals.terminal,
            "initial_free": residuals.initial_free,
            "terminal_free": residuals.terminal_free,
        }
    )
    if not (residuals.initial_free or residuals.terminal_free):
        report.notes.append("both endpoints are fixed, no transversality condition applies")
    report.ok = residuals.holds(context.tolerance_for(problem.scale))


def iso_check(context: Context, report: Report) -> None:
    """Check the four isoperimetric conditions and classify the extremal."""
    problem_file = _kind(context, "composition")
    problem = problem_file.problem
    assert isinstance(problem, CompositionProblem)
    y, lam = _composition_trajectory(context, problem)
    if lam is None:
        raise ProblemFileError(problem_file.path, "iso-check needs lambda together with y", "composition")
    tolerance = context.tolerance_for(problem.scale)
    residuals = iso_residuals(problem, y, lam)
    report.values["lambda"] = lam
    report.values["constraint_value"] = residuals.constraint_value
    report.values["constraint_gap"] = residuals.constraint_gap
    for index, (deviation, constant) in enumerate(zip(residuals.max_abs, residuals.constants), start=1):
        report.values[f"condition_{index}"] = deviation
        report.values[f"constant_{index}"] = constant
    report.values["normality"] = str(classify_extremal(problem, y, tolerance))
    first, _, _, fourth = residuals.conditions
    report.tables["isoperimetric"] = _grid_rows(condition_1=first, condition_4=fourth)
    enforced = (0, 3)
    report.ok = all(
        residuals.max_abs[index] <= tolerance * (1.0 + abs(residuals.constants[index])) for index in enforced
    )


def synthesize(context: Context, report: Report) -> None:
    """Synthesize a Lagrangian for the target trajectory and verify it."""
    problem_file = _kind(context, "synthesis")
    spec = problem_file.problem
    assert isinstance(spec, SynthesisSpec) and spec.y0 is not None
    lagrangian = synthesize_lagrangian(spec)
    verification = verify_synthesis(lagrangian, spec, seed=context.seed)
    report.values.update(
        {
            "el_residual": verification.el_residual,
            "legendre_deviation": verification.legendre_deviation,
            "probe_min_change": verification.probe_min_change,
            "seed": verification.seed,
        }
    )
    target = GridFunction(spec.scale, spec.target_legendre(), 0, spec.inner)
    report.tables["lagrangian"] = _grid_rows(
        y0=spec.y0, R=lagrangian.R_func, Q=lagrangian.Q_func, legendre=verification.legendre, p=target
    )
    report.notes.extend(verification.failures)
    report.ok = verification.passed


def helmholtz(context: Context, report: Report) -> None:
    """Run the self-adjointness test of an integro-differential equation."""
    problem_file = _kind(context, "helmholtz")
    ide = problem_file.problem
    assert isinstance(ide, IntegroDiffEquation)
    trials = problem_file.trials if problem_file.trials is not None else settings.HELMHOLTZ_TRIALS
    seed = first_given(context.args.seed, problem_file.seed, default=context.seed)
    verdict = helmholtz_check(ide, problem_file.scale, trials, seed)
    report.values.update(
        {"verdict": str(verdict.status), "max_abs_d": verdict.max_abs_d, "trials": trials, "seed": verdict.seed}
    )
    if verdict.witness is not None:
        report.values["witness_t"] = verdict.witness.t
        report.values["witness_d"] = verdict.witness.value
        report.tables["witness_curve"] = _grid_rows(y=verdict.witness.curve)
    report.notes.extend(verdict.notes)
    rejected = verdict.status == HelmholtzStatus.NOT_EULER_LAGRANGE
    report.ok = rejected if context.expect == "not-el" else not rejected


COMMANDS: Final[dict[str, Callable[[Context, Report], None]]] = {
    "analyze-scale": analyze_scale,
    "solve": solve,
    "check-el": check_el,
    "transversality": transversality,
    "iso-check": iso_check,
    "synthesize": synthesize,
    "helmholtz": helmholtz,
}


def _steps(text: str) -> list[float]:
    try:
        return [float(item) for item in text.split(",") if item.strip()]
    except ValueError as error:
        raise argparse.ArgumentTypeError(f"expected comma separated steps, got {text!r}") from error


def build_parser() -> argparse.ArgumentParser:
    """Create the argument parser."""
    parser = argparse.ArgumentParser(prog="tsvar", description="Calculus of variations on time scales.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("target", help="problem file, or a scale spec for analyze-scale")
    parser.add_argument("--format", choices=["text", "json", "csv"], default=None)
    parser.add_argument("--tol", type=float, default=None, help="constancy tolerance of the checks")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--multistart", type=int, default=None)
    parser.add_argument("--objective", choices=[str(item) for item in Objective], default=None)
    parser.add_argument("--refine", type=_steps, default=None, help="hZ steps h1,h2,... of a refinement sweep")
    parser.add_argument("--expect", choices=["el", "not-el"], default=None)
    parser.add_argument("--output", type=Path, default=None, help="write the report to a file")
    parser.add_argument("--timings", action="store_true", help="add wall-clock timings to the report")
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    """Run one command and get its exit code."""
    args = build_parser().parse_args(argv)
    try:
        target = Path(args.target)
        problem_file = None
        if args.command != "analyze-scale" or target.is_file():
            problem_file = load_problem(target)
        context = Context(args, problem_file)
        report = Report(command=args.command, source=args.target)
        if problem_file is not None:
            report.scale = scale_summary(problem_file.scale)
        started = time.perf_counter()
        COMMANDS[args.command](context, report)
        if args.timings:
            report.timings = {args.command: time.perf_counter() - started}
        report.values = {key: plain(value) for key, value in report.values.items()}
        text = render(report, context.output_format)
    except (ConvergenceError, NoConvergentStartError) as error:
        LOGGER.error("%s", error)
        return EXIT_CHECK_FAILED
    except TsvarError as error:
        LOGGER.error("%s", error)
        return EXIT_INPUT_ERROR
    except Exception:
        LOGGER.exception("Unexpected failure of %s on %s", args.command, args.target)
        return EXIT_INPUT_ERROR
    if args.output is not None:
        args.output.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if not report.ok:
        LOGGER.warning("%s on %s failed its checks", args.command, args.target)
        return EXIT_CHECK_FAILED
    return EXIT_OK


def main() -> None:
    """Entry point of the tsvar console script."""
    setup_logger(settings.LOG_FILE, settings.LOG_LEVEL)
    sys.exit(run())


if __name__ == "__main__":
    main()
