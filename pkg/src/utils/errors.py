"""Exception hierarchy for phase construction, solves and the CLI."""
from typing import Optional


class PhaseFunctionError(Exception):
    """Base class for every error raised by this package."""


# ---------- bad input ----------

class InvalidIntervalError(PhaseFunctionError, ValueError):
    """Interval endpoints are not finite or not increasing."""


class InvalidOrderError(PhaseFunctionError, ValueError):
    """Grid order or special-function order is outside its valid range."""


class OutOfDomainError(PhaseFunctionError, ValueError):
    """Evaluation point lies outside the represented interval."""


class InvalidParametersError(PhaseFunctionError, ValueError):
    """Problem parameters violate a documented precondition."""


class PhaseFileError(PhaseFunctionError, ValueError):
    """Phase file is malformed, truncated or fails its checksum."""


# ---------- numerical failure ----------

class NumericalFailure(PhaseFunctionError, ArithmeticError):
    """A numerical procedure failed.

    ``interval`` is filled in by the marcher with the index of the interval
    that failed.
    """

    def __init__(self, message: str, interval: Optional[int] = None):
        super().__init__(message)
        self.interval = interval

    def with_interval(self, index: int) -> "NumericalFailure":
        self.interval = index
        self.args = (f"interval {index}: {self.args[0]}",) + self.args[1:]
        return self


class NoConvergenceError(NumericalFailure):
    """Correction sweeps did not bring the collocation residual below tolerance."""

    def __init__(self, message: str, residual: float, interval: Optional[int] = None):
        super().__init__(message, interval)
        self.residual = residual


class NewtonFailureError(NumericalFailure):
    """An implicit substep did not converge."""


class NonFiniteRhsError(NumericalFailure):
    """The right-hand side returned inf or nan at an accepted state."""


class CoefficientNonpositiveError(NumericalFailure):
    """The coefficient q (or its windowed version) is not strictly positive."""


class NonpositiveDerivativeError(NumericalFailure):
    """exp(r/2) underflowed, so the phase derivative is not positive."""


class DegeneratePhaseError(NumericalFailure):
    """A phase derivative value that should be positive is not."""


class SingularSystemError(NumericalFailure):
    """The 2x2 boundary system is (nearly) singular."""
