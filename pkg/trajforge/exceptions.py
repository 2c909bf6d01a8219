"""
Copyright © 2024 trajforge developers.

Error family shared by every module. Each class derives from the closest builtin so
callers may catch either the named error or the builtin.
"""
from typing import Optional


class RecordError(ValueError):
    """A record violates its type invariants or cannot be (de)serialized."""

    def __init__(self, message: str, field: Optional[str] = None,
                 index: Optional[int] = None, line: Optional[int] = None):
        prefix = []
        if line is not None:
            prefix.append(f"line {line}")
        if index is not None:
            prefix.append(f"record {index}")
        if field is not None:
            prefix.append(f"field '{field}'")
        super().__init__(f"{', '.join(prefix)}: {message}" if prefix else message)
        self.field = field
        self.index = index
        self.line = line


class ActionParseError(ValueError):
    """Backend output does not follow the ReACT step format."""


class MissingAction(ActionParseError):
    pass


class MissingActionInput(ActionParseError):
    pass


class InvalidSameStep(ActionParseError):
    pass


class AssistantUnavailable(RuntimeError):
    pass


class OffsetOutOfRange(IndexError):
    pass


class InsufficientNodes(ValueError):
    pass


class BadRatios(ValueError):
    pass


class EmptyMatrix(ValueError):
    pass


class DimensionMismatch(ValueError):
    pass


class ShapeMismatch(ValueError):
    pass


class ConfigError(ValueError):
    pass


class NonFinite(ArithmeticError):
    pass


class LeakDetected(RuntimeError):
    pass


class UnknownTool(KeyError):
    pass


class BackendError(RuntimeError):
    pass


class TransportError(BackendError):
    pass


class QuotaError(BackendError):
    pass


class ScriptExhausted(BackendError):
    pass


class CassetteMismatch(BackendError):
    pass


class JudgeUnavailable(RuntimeError):
    pass


class UnparsableScore(ValueError):
    pass


class EmptyResult(RuntimeError):
    pass
