"""
Exception types raised across the package.

Every class derives from both DiarclustError and the closest builtin, so
callers may catch either.
"""

from typing import Optional


class DiarclustError(Exception):
    """Base class for all package errors."""


class NumericsDomainError(DiarclustError, ValueError):
    """Argument outside the domain of a special function."""


class ShapeMismatchError(DiarclustError, ValueError):
    """Operand shapes or lengths are inconsistent."""


class UnsupportedPrimitiveError(DiarclustError, TypeError):
    """An expression asked the tape for a primitive it does not know."""


class EvaluationError(DiarclustError, ArithmeticError):
    """A primitive could not be evaluated (e.g. division by zero)."""


class TapeStateError(DiarclustError, RuntimeError):
    """Backward requested on a tape that never recorded the seed."""


class ResponsibilityValidationError(DiarclustError, ValueError):
    """A responsibility matrix is not row-stochastic."""


class IndexMapError(DiarclustError, ValueError):
    """Responsibility rows do not line up with retained chunk slots."""


class InfeasibleConstraintError(DiarclustError, ValueError):
    """Cannot-link constraints make the requested cluster count unreachable."""


class TrainingDivergedError(DiarclustError, RuntimeError):
    """The training loss became non-finite."""

    def __init__(self, message: str, epoch: Optional[int] = None):
        super().__init__(message)
        self.epoch = epoch


class _LineError(DiarclustError, ValueError):
    """Parse failure tied to a 1-based line number of the input file."""

    def __init__(self, message: str, line_number: int):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class RttmParseError(_LineError):
    """Malformed RTTM line."""


class EmbeddingCsvError(_LineError):
    """Malformed row in an embeddings CSV file."""
