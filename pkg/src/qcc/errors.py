"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class QCCError(Exception):
    """Base class for all package errors."""


class InvalidModulusError(QCCError, ValueError):
    """Register dimension N below 2."""


class DomainError(QCCError, ValueError):
    """A symbol lies outside Z_N."""


class ShapeError(QCCError, ValueError):
    """Mismatched lengths, register counts or matrix shapes."""


class ValidationError(QCCError, ValueError):
    """Structurally invalid input (duplicate targets, non-unitary matrix, ...)."""


class ConstructionError(QCCError, ValueError):
    """An encoder cannot be built from the given ingredients."""


class RangeError(QCCError, IndexError):
    """A logical index too close to the truncation boundary."""


class ResourceError(QCCError, RuntimeError):
    """The requested enumeration exceeds the configured budget.

    ``bound`` carries the computed size that tripped the limit.
    """

    def __init__(self, message: str, bound: int):
        super().__init__(message)
        self.bound = bound


class UnrecoverableError(QCCError, RuntimeError):
    """Corruption leaves no overlap with any correctable coset of the code."""
