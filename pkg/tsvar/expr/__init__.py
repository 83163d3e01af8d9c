"""The integrand expression language."""

from .dual import DiffValue
from .evaluate import DomainFaultError, UnboundVariableError, eval_with_partials, evaluate
from .integrand import ExprIntegrand, Integrand, PartialIntegrand, SampledPartials, as_integrand, sample
from .nodes import Expression, pretty
from .parser import ExprSyntaxError, UndeclaredIdentifierError, parse

__all__ = [
    "DiffValue",
    "DomainFaultError",
    "ExprIntegrand",
    "ExprSyntaxError",
    "Expression",
    "Integrand",
    "PartialIntegrand",
    "SampledPartials",
    "UnboundVariableError",
    "UndeclaredIdentifierError",
    "as_integrand",
    "eval_with_partials",
    "evaluate",
    "parse",
    "pretty",
    "sample",
]
