"""Calculus of variations on time scales."""

__version__ = "0.2.0"


class TsvarError(Exception):
    """Base class for all errors raised by the variational engines."""
