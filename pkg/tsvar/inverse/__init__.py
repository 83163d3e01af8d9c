"""Inverse problems: Lagrangian synthesis and the Helmholtz test."""

from .helmholtz import (
    EquationOfVariation,
    HelmholtzStatus,
    HelmholtzVerdict,
    IntegroDiffEquation,
    Witness,
    equation_of_variation,
    helmholtz_check,
    sample_curves,
    self_adjoint_operator,
)
from .synthesis import (
    SynthesisError,
    SynthesisReport,
    SynthesisSpec,
    SynthesizedLagrangian,
    recursion_coefficients,
    solve_R_recursion,
    synthesize_lagrangian,
    verify_synthesis,
)

__all__ = [
    "EquationOfVariation",
    "HelmholtzStatus",
    "HelmholtzVerdict",
    "IntegroDiffEquation",
    "SynthesisError",
    "SynthesisReport",
    "SynthesisSpec",
    "SynthesizedLagrangian",
    "Witness",
    "equation_of_variation",
    "helmholtz_check",
    "recursion_coefficients",
    "sample_curves",
    "self_adjoint_operator",
    "solve_R_recursion",
    "synthesize_lagrangian",
    "verify_synthesis",
]
