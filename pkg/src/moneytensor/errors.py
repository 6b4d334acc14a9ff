"""Exception hierarchy shared across the toolkit.

Everything user-facing derives from ValidationError (bad values, bad
labels, bad files) so the CLI can map it to a single exit code.
"""

from __future__ import annotations


class ValidationError(ValueError):
    """Input violates a documented contract (shapes, labels, invariants)."""


class UnknownLabelError(ValidationError):
    """A transaction or action references a label missing from the taxonomy."""

    def __init__(self, axis: str, label: str):
        self.axis = axis
        self.label = label
        super().__init__(f"unknown {axis} label: {label!r}")


class CsvFormatError(ValidationError):
    """Malformed delimited input; carries the 1-based offending line number."""

    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


class SchemaError(ValidationError):
    """Structured document (JSON scenario/tensor) violates its schema.

    ``path`` is a dotted location such as ``indicators.u_max`` or
    ``shocks[0].kind``.
    """

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")
