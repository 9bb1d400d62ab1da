"""Exception types shared across the package."""

from __future__ import annotations


class GL3KError(Exception):
    """Base class for all package errors."""


class NotInvertible(GL3KError, ValueError):
    pass


class ModuliNotCoprime(GL3KError, ValueError):
    pass


class NotDivisor(GL3KError, ValueError):
    pass


class InvalidSplit(GL3KError, ValueError):
    pass


class DivisibilityViolated(GL3KError, ValueError):
    pass


class InternalNonCoprime(GL3KError, RuntimeError):
    """An inverse required by a congruence system does not exist.

    Only raised when an enumeration produced an inadmissible tuple, so it
    always indicates a bug rather than bad user input.
    """


class OrderTooLarge(GL3KError, ValueError):
    pass


class QuadratureNotConverged(GL3KError, ArithmeticError):
    pass


class NotConverged(GL3KError, ArithmeticError):
    pass


class OutsideWindow(GL3KError, ValueError):
    """Arguments fall outside the supported numeric window."""


class VerificationFailed(GL3KError):
    pass


class InvalidArguments(GL3KError, ValueError):
    pass
