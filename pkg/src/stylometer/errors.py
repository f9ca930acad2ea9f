"""Exception types shared across the toolkit.

Parsing errors carry enough position information (byte offset or line
number) to locate the problem in the input file.
"""

from __future__ import annotations


class StylometerError(Exception):
    """Base class for all toolkit errors."""


class MalformedRecord(StylometerError):
    """A document record in an SGML collection file is structurally broken."""

    def __init__(self, message: str, byte_offset: int):
        super().__init__(f"{message} (byte offset {byte_offset})")
        self.byte_offset = byte_offset


class MalformedLine(StylometerError):
    """A line in a line-oriented input file does not match the format."""

    def __init__(self, message: str, line_number: int):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class UnbalancedParens(StylometerError):
    """A bracketed tree has mismatched parentheses."""

    def __init__(self, message: str, byte_offset: int):
        super().__init__(f"{message} (byte offset {byte_offset})")
        self.byte_offset = byte_offset


class TreeBeforeDocHeader(StylometerError):
    """A tree line appeared before any ``#DOC`` header."""

    def __init__(self, byte_offset: int):
        super().__init__(
            f"tree line before any #DOC header (byte offset {byte_offset})"
        )
        self.byte_offset = byte_offset


class MissingLabel(StylometerError):
    """A document required a category label but had none."""


class EmptyInput(StylometerError):
    """An operation that needs at least one value received none."""


class EmptySample(StylometerError):
    """A rank-sum test sample is empty."""


class EmptyCategory(StylometerError):
    """A category contributes no usable values for the requested field."""


class ExactModeUnavailable(StylometerError):
    """Exact rank-sum mode was requested but ties or sample size forbid it."""


class TooFewSeeds(StylometerError):
    """The discriminant seed set has too few classes or members."""


class SingularCovariance(StylometerError):
    """The pooled covariance is not positive definite even after the ridge."""


class IncompleteVector(StylometerError):
    """A style vector is missing a field required for classification."""
