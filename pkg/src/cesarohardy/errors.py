"""Exception hierarchy shared by every module."""


class CesaroHardyError(Exception):
    """Base class for all errors raised by this package."""


class InvalidArgument(CesaroHardyError, ValueError):
    """A parameter violates an operation precondition (n = 0, alpha <= 0, ...)."""


class DomainError(CesaroHardyError, ValueError):
    """An evaluation point lies outside the domain (t <= 0, Re z <= 0, poles)."""


class DivergenceError(CesaroHardyError, ArithmeticError):
    """The requested quantity is infinite (e.g. a kernel diagonal with alpha <= 1/2)."""


class UnsupportedFunction(CesaroHardyError, ValueError):
    """A function lacks the decay or smoothness metadata an operator requires."""


class NotPositiveDefinite(CesaroHardyError, ArithmeticError):
    """Cholesky factorisation failed even at the largest allowed jitter."""


class InsufficientSamples(CesaroHardyError, ValueError):
    """Too few sample paths for a meaningful statistical estimate."""


class ConfigError(CesaroHardyError, ValueError):
    """Invalid command-line configuration."""


class BoundViolation(CesaroHardyError, AssertionError):
    """A proved inequality failed beyond the propagated numerical error."""
