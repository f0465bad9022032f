"""Exception types shared across the package.

Each carries a ``report`` dict so the CLI can emit a machine-readable error.
"""

from __future__ import annotations


class PinsumError(Exception):
    exit_code = 5

    def __init__(self, message: str, **report) -> None:
        super().__init__(message)
        self.report = {"error": type(self).__name__, "message": message, **report}


class ParseError(PinsumError, ValueError):
    exit_code = 2


class UnknownCatalogEntry(ParseError):
    pass


class OracleIncomplete(PinsumError):
    exit_code = 3


class WindowExceeded(PinsumError):
    exit_code = 4


class WindowTooSmall(WindowExceeded):
    pass


class InvariantViolation(PinsumError):
    exit_code = 5


class NotPeriodic(PinsumError):
    pass


class MissingMarking(PinsumError):
    exit_code = 3


class MissingModel(OracleIncomplete):
    pass


class PreconditionViolated(PinsumError):
    pass


class NoLift(InvariantViolation):
    pass


class WindowMismatch(PinsumError):
    exit_code = 4


class EvenDegreeIrreducible(ParseError):
    pass
