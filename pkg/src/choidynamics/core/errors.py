"""
Exception types raised by choidynamics.

Every class derives from ``ChoiDynamicsError`` and from the builtin that
plain Python code would have raised in the same situation, so callers may
catch either one.
"""


class ChoiDynamicsError(Exception):
    """Base class for all choidynamics errors."""


class SizeError(ChoiDynamicsError, ValueError):
    """Matrix shape or dimension mismatch."""


class HermiticityError(ChoiDynamicsError, ValueError):
    """A spectral routine received a matrix that is not Hermitian within tolerance."""


class DomainError(ChoiDynamicsError, ValueError):
    """Parameters violate an operation's precondition.

    The message names the inequality that failed.
    """


class ValidationError(ChoiDynamicsError, ValueError):
    """Malformed structured input (Q blocks, serialized matrices, ranges)."""


class ConstructionError(ChoiDynamicsError, RuntimeError):
    """A built object failed its post-assertion."""


class ConvergenceError(ChoiDynamicsError, RuntimeError):
    """Root bracketing or post-verification of a root failed."""


class PropertyViolationError(ChoiDynamicsError, RuntimeError):
    """A closed-form identity or a hereditary-property scan was violated."""
