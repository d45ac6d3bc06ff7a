"""Exception types shared across the package."""


class NumericalError(Exception):
    """Base class for runtime numerical failures (as opposed to bad input)."""


class QuadratureConvergenceError(NumericalError):
    """Node doubling hit the cap without the integral stabilizing."""


class DegenerateInputError(NumericalError):
    """An all-zero linear system, typically from a function that is
    identically zero on the support."""


class OracleDegenerateError(NumericalError):
    """The determinant construction produced the zero polynomial."""


class ComparisonUnavailableError(NumericalError):
    """A dual-pipeline comparison could not run; carries the evidence
    from whichever side failed."""

    def __init__(self, message, pade_certificate=None, classical_certificate=None):
        super().__init__(message)
        self.pade_certificate = pade_certificate
        self.classical_certificate = classical_certificate
