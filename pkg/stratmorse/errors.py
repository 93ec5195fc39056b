"""Exception hierarchy shared by the library and the CLI."""
from __future__ import annotations


class StratMorseError(RuntimeError):
    """Base class for every error raised by stratmorse"""


class InputError(StratMorseError):
    """Raised when an argument is malformed (unknown cell, non-subcomplex, ties in f, ...)"""


class ParseError(InputError):
    """Raised when a cwx document cannot be parsed"""

    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


class StratificationError(InputError):
    """Raised when a level map is not monotone under the face order"""

    def __init__(self, parent: str, child: str, detail: str):
        super().__init__(detail)
        self.witness = (parent, child)


class IntervalError(InputError):
    """Raised when an interval does not isolate exactly one value of f"""


class PreconditionError(StratMorseError):
    """Raised when a mathematical precondition of an operation does not hold"""


class InconclusiveError(StratMorseError):
    """Raised when a verdict depends on a search that ran out of budget"""


class InvalidPair(StratMorseError):
    """Raised when a collapse certificate fails to replay"""

    def __init__(self, index: int, reason: str):
        super().__init__(f"pair {index}: {reason}")
        self.index = index
        self.reason = reason


class InvariantViolation(StratMorseError):
    """Raised when an identity that must hold by theorem fails"""
