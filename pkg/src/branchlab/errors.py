"""Exception hierarchy shared by every module.

DomainError marks inputs outside an operation's domain (CLI exit 2);
ConvergenceError marks an iteration or quadrature that failed to certify
its result (CLI exit 3).
"""

from __future__ import annotations


class BranchLabError(Exception):
    """Base class for all library errors."""


class DomainError(BranchLabError):
    """Input outside the operation's domain of validity."""


class ConvergenceError(BranchLabError):
    """Iteration or quadrature failed to reach the requested tolerance.

    The partially converged report, when one exists, is attached as
    ``report`` so callers can inspect how far the computation got.
    """

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report
