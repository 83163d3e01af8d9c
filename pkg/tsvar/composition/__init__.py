"""Delta-nabla composition problems."""

from .conditions import (
    ELForms,
    IsoResiduals,
    QuotientResiduals,
    Transversality,
    classify_extremal,
    el_form_gap,
    el_forms_of,
    el_residuals,
    is_quotient,
    iso_residuals,
    quotient_el_residuals,
    transversality_residuals,
)
from .problem import (
    CompositionProblem,
    CompositionState,
    FamilyEvaluation,
    IntegralFamily,
    IsoConstraint,
    MissingConstraintError,
    Normality,
    Objective,
    argument_names,
    evaluate_composition,
    evaluate_family,
)
from .refinement import RefinementRow, refinement_sweep
from .solver import (
    Extremal,
    NoConvergentStartError,
    SolveOptions,
    initial_guesses,
    solve_composition,
    start_multipliers,
)

__all__ = [
    "CompositionProblem",
    "CompositionState",
    "ELForms",
    "Extremal",
    "FamilyEvaluation",
    "IntegralFamily",
    "IsoConstraint",
    "IsoResiduals",
    "MissingConstraintError",
    "NoConvergentStartError",
    "Normality",
    "Objective",
    "QuotientResiduals",
    "RefinementRow",
    "SolveOptions",
    "Transversality",
    "argument_names",
    "classify_extremal",
    "el_form_gap",
    "el_forms_of",
    "el_residuals",
    "evaluate_composition",
    "evaluate_family",
    "initial_guesses",
    "is_quotient",
    "iso_residuals",
    "quotient_el_residuals",
    "refinement_sweep",
    "solve_composition",
    "start_multipliers",
    "transversality_residuals",
]
