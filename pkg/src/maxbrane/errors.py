"""Exception hierarchy shared by every module and mapped to CLI exit codes."""

from __future__ import annotations


class MaxbraneError(Exception):
    """Base class for all errors raised by the package."""


class PreconditionError(MaxbraneError, ValueError):
    """Caller supplied input that violates an operation's precondition (exit code 2)."""


class DegenerateLatticeError(PreconditionError):
    pass


class UnsupportedHypothesisError(PreconditionError):
    """An operation was asked for something only defined under a hypothesis that fails."""


class InvariantError(MaxbraneError, AssertionError):
    """An internal consistency check failed (exit code 3).

    Every occurrence contradicts either the implementation or a theorem the
    computation relies on, and should be reported as a bug.
    """


def check(condition: bool, message: str) -> None:
    if not condition:
        raise InvariantError(message)
