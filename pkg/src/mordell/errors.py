"""Exception hierarchy shared by the library and the command line tool.

Each class carries the process exit code the CLI maps it to, so the
mapping lives in one place.
"""

from __future__ import annotations


class MordellError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


class PreconditionError(MordellError):
    """An input violates a documented precondition (bad window, bad weight)."""

    exit_code = 1


class BudgetError(MordellError):
    """A computation would exceed its documented size or time budget."""

    exit_code = 2


class InternalConsistencyError(MordellError):
    """Two independent evaluation paths disagreed beyond tolerance."""

    exit_code = 3


class AccuracyError(MordellError):
    """A quadrature or series truncation failed to reach requested accuracy."""

    exit_code = 4
