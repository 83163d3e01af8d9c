"""Recursive descent parser for the integrand expression language.

Grammar, loosest binding first::

    expression := term (("+" | "-") term)*
    term       := unary (("*" | "/") unary)*
    unary      := ("-" | "+") unary | power
    power      := atom ("^" unary)?
    atom       := number | constant | variable | function "(" expression ")" | "(" expression ")"

``^`` is right associative and binds tighter than unary minus, so ``-x^2`` is ``-(x^2)``.
"""

from __future__ import annotations

import math
import re
from collections.abc import Iterable
from dataclasses import dataclass
from enum import StrEnum
from typing import Final

from .. import TsvarError
from .nodes import CONSTANTS, FUNCTIONS, Binary, Call, Constant, Expression, Node, Number, Unary, Variable

_NUMBER: Final = re.compile(r"(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?")
_IDENTIFIER: Final = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")
_OPERATORS: Final = "+-*/^()"


class ExprSyntaxError(TsvarError):
    """The expression text does not follow the grammar."""

    def __init__(self, reason: str, column: int, source: str = "") -> None:
        """Create an ExprSyntaxError instance."""
        self.reason = reason
        self.column = column
        self.source = source
        super().__init__(f"{reason} at column {column}" + (f" in '{source}'" if source else ""))


class UndeclaredIdentifierError(ExprSyntaxError):
    """The expression references a name that is neither declared nor built in."""

    def __init__(self, name: str, column: int, source: str = "") -> None:
        """Create an UndeclaredIdentifierError instance."""
        self.name = name
        super().__init__(f"undeclared identifier '{name}'", column, source)


class TokenKind(StrEnum):
    """Token categories."""

    NUMBER = "number"
    IDENTIFIER = "identifier"
    OPERATOR = "operator"
    END = "end"


@dataclass(frozen=True)
class Token:
    """A token with its 1-based column."""

    kind: TokenKind
    text: str
    column: int


def tokenize(source: str) -> list[Token]:
    """Split the source into tokens."""
    tokens: list[Token] = []
    index = 0
    while index < len(source):
        char = source[index]
        if char.isspace():
            index += 1
            continue
        if char.isdigit() or (char == "." and index + 1 < len(source) and source[index + 1].isdigit()):
            match = _NUMBER.match(source, index)
            if match is None:  # pragma: no cover - the guard above ensures a match
                raise ExprSyntaxError("malformed number", index + 1, source)
            if math.isinf(float(match.group(0))):
                raise ExprSyntaxError("number out of range", index + 1, source)
            tokens.append(Token(TokenKind.NUMBER, match.group(0), index + 1))
            index = match.end()
            continue
        if char.isalpha() or char == "_":
            match = _IDENTIFIER.match(source, index)
            name = match.group(0) if match is not None else char
            tokens.append(Token(TokenKind.IDENTIFIER, name, index + 1))
            index += len(name)
            continue
        if char in _OPERATORS:
            tokens.append(Token(TokenKind.OPERATOR, char, index + 1))
            index += 1
            continue
        raise ExprSyntaxError(f"unexpected character '{char}'", index + 1, source)
    tokens.append(Token(TokenKind.END, "", len(source) + 1))
    return tokens


class _Parser:
    """Parser state over a token list."""

    def __init__(self, source: str, variables: frozenset[str]) -> None:
        self._source = source
        self._variables = variables
        self._tokens = tokenize(source)
        self._position = 0

    @property
    def _current(self) -> Token:
        return self._tokens[self._position]

    def _advance(self) -> Token:
        token = self._tokens[self._position]
        self._position += 1
        return token

    def _at_operator(self, *operators: str) -> bool:
        token = self._current
        return token.kind == TokenKind.OPERATOR and token.text in operators

    def _expect(self, operator: str) -> None:
        if not self._at_operator(operator):
            raise self._error(f"expected '{operator}'")
        self._advance()

    def _error(self, reason: str) -> ExprSyntaxError:
        token = self._current
        found = "end of input" if token.kind == TokenKind.END else f"'{token.text}'"
        return ExprSyntaxError(f"{reason}, found {found}", token.column, self._source)

    def parse(self) -> Node:
        node = self._expression()
        if self._current.kind != TokenKind.END:
            raise self._error("expected an operator")
        return node

    def _expression(self) -> Node:
        node = self._term()
        while self._at_operator("+", "-"):
            op = self._advance().text
            node = Binary(op, node, self._term())
        return node

    def _term(self) -> Node:
        node = self._unary()
        while self._at_operator("*", "/"):
            op = self._advance().text
            node = Binary(op, node, self._unary())
        return node

    def _unary(self) -> Node:
        if self._at_operator("-", "+"):
            op = self._advance().text
            return Unary(op, self._unary())
        return self._power()

    def _power(self) -> Node:
        base = self._atom()
        if self._at_operator("^"):
            self._advance()
            return Binary("^", base, self._unary())
        return base

    def _atom(self) -> Node:
        token = self._current
        if token.kind == TokenKind.NUMBER:
            self._advance()
            return Number(float(token.text))
        if token.kind == TokenKind.IDENTIFIER:
            self._advance()
            if token.text in FUNCTIONS:
                self._expect("(")
                argument = self._expression()
                self._expect(")")
                return Call(token.text, argument)
            if token.text in self._variables:
                return Variable(token.text, token.column)
            if token.text in CONSTANTS:
                return Constant(token.text)
            raise UndeclaredIdentifierError(token.text, token.column, self._source)
        if self._at_operator("("):
            self._advance()
            node = self._expression()
            self._expect(")")
            return node
        raise self._error("expected a number, a name or '('")


def parse(text: str, variables: Iterable[str]) -> Expression:
    """Parse an expression over the declared variables."""
    declared = tuple(variables)
    if not text.strip():
        raise ExprSyntaxError("empty expression", 1, text)
    root = _Parser(text, frozenset(declared)).parse()
    return Expression(root, declared, text)
