"""Direct variational problems on time scales."""

from .functional import Discretization, Flavor, discretize
from .newton import ConvergenceError, NewtonResult, SingularHessianError, damped_newton
from .problem import (
    BoundaryViolationError,
    ELReport,
    InvalidProblemError,
    VariationalProblem,
    check_boundary,
    dagger,
    default_tolerance,
    dubois_reymond_probe,
    el_differential_residual,
    el_integral_residual,
    evaluate_functional,
    functional_gradient,
    hat_function,
    legendre_quantity,
    nabla_el_residual,
)
from .solver import free_indices, linear_interpolant, solve_direct

__all__ = [
    "BoundaryViolationError",
    "ConvergenceError",
    "Discretization",
    "ELReport",
    "Flavor",
    "InvalidProblemError",
    "NewtonResult",
    "SingularHessianError",
    "VariationalProblem",
    "check_boundary",
    "dagger",
    "damped_newton",
    "default_tolerance",
    "discretize",
    "dubois_reymond_probe",
    "el_differential_residual",
    "el_integral_residual",
    "evaluate_functional",
    "free_indices",
    "functional_gradient",
    "hat_function",
    "legendre_quantity",
    "linear_interpolant",
    "nabla_el_residual",
    "solve_direct",
]
