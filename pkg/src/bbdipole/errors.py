"""Exception hierarchy.

Every exception carries the process exit code the CLI maps it to, so the
command-line front end never has to special-case individual classes.
"""

from __future__ import annotations


class BBDipoleError(Exception):
    exit_code = 1


class DomainError(BBDipoleError, ValueError):
    """Argument outside the mathematical or physical domain of an operation."""

    exit_code = 3


class UnsupportedModelError(DomainError):
    """The operation has no formula for the given polarizability model."""


class NegativeAbsorptionError(DomainError):
    """Im(alpha) < 0 encountered (population inversion) where it is not allowed."""


class RegimeError(DomainError):
    """Inputs outside the validity regime of an approximate formula."""


class NumericalError(BBDipoleError, ArithmeticError):
    exit_code = 4


class QuadratureError(NumericalError):
    """Adaptive integration did not converge.

    ``partial`` and ``err`` hold the best value and error estimate reached.
    """

    def __init__(self, message: str, partial: float = float("nan"), err: float = float("inf")):
        super().__init__(message)
        self.partial = partial
        self.err = err


class ConsistencyError(NumericalError):
    """Two independent evaluation routes disagree beyond tolerance."""


class ExtractionError(NumericalError):
    """A limit/curvature extraction produced a residual above threshold."""


class StiffnessError(NumericalError):
    """ODE integration failed (step size underflow)."""


class StepRejectedError(NumericalError):
    """Time step violates positivity; ``suggested_dt`` is a safer step."""

    def __init__(self, message: str, suggested_dt: float):
        super().__init__(message)
        self.suggested_dt = suggested_dt
