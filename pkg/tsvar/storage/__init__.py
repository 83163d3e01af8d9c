"""Loading of problem files."""

from .problem_file import (
    OptionsSection,
    OutputFormat,
    ProblemDocument,
    ProblemFile,
    ProblemFileError,
    load_problem,
    read_document,
    trajectory_on,
)

__all__ = [
    "OptionsSection",
    "OutputFormat",
    "ProblemDocument",
    "ProblemFile",
    "ProblemFileError",
    "load_problem",
    "read_document",
    "trajectory_on",
]
