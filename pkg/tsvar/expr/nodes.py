"""Syntax tree of the integrand expression language."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Final

FUNCTIONS: Final = ("sin", "cos", "exp", "log", "sqrt", "abs")
CONSTANTS: Final = ("pi", "e")


@dataclass(frozen=True)
class Number:
    """A binary64 literal."""

    value: float


@dataclass(frozen=True)
class Constant:
    """A named constant (pi or e)."""

    name: str


@dataclass(frozen=True)
class Variable:
    """A declared variable."""

    name: str
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Unary:
    """Unary minus or plus."""

    op: str
    operand: Node


@dataclass(frozen=True)
class Binary:
    """A binary arithmetic operation."""

    op: str
    left: Node
    right: Node


@dataclass(frozen=True)
class Call:
    """A call of one of the built-in functions."""

    function: str
    argument: Node


Node = Number | Constant | Variable | Unary | Binary | Call


def pretty(node: Node) -> str:
    """Render a tree so that parsing the text gives the same tree back."""
    match node:
        case Number(value):
            return repr(float(value))
        case Constant(name) | Variable(name):
            return name
        case Unary(op, operand):
            return f"({op}{pretty(operand)})"
        case Binary(op, left, right):
            return f"({pretty(left)} {op} {pretty(right)})"
        case Call(function, argument):
            return f"{function}({pretty(argument)})"
    raise TypeError(f"Unknown expression node {node!r}")


def variables_of(node: Node) -> frozenset[str]:
    """Get the names of the variables a tree references."""
    match node:
        case Variable(name):
            return frozenset({name})
        case Unary(_, operand) | Call(_, operand):
            return variables_of(operand)
        case Binary(_, left, right):
            return variables_of(left) | variables_of(right)
    return frozenset()


@dataclass(frozen=True)
class Expression:
    """A parsed expression together with its declared variables."""

    root: Node
    variables: tuple[str, ...]
    source: str = field(default="", compare=False)

    def __str__(self) -> str:
        """Get the source text, or the pretty print when there is none."""
        return self.source or pretty(self.root)

    @property
    def referenced(self) -> frozenset[str]:
        """Variables actually used by the expression."""
        return variables_of(self.root)
