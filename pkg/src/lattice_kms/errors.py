"""Exception types shared across the package."""


class LatticeKmsError(Exception):
    """Base class for all package-specific errors."""


class DimensionCapError(LatticeKmsError, ValueError):
    """A requested dense operator would exceed the desk-scale size cap."""


class RangeOverflowError(LatticeKmsError, ValueError):
    """beta * spectral width is too large for a stable imaginary-time conjugation."""


class HypothesisViolationError(LatticeKmsError, ValueError):
    """A coupling sample violates the hypothesis of the inequality under test."""


class CertificateNotEstablishedError(LatticeKmsError, RuntimeError):
    """A convergence certificate required by an operation does not hold."""


class ConvergenceError(LatticeKmsError, RuntimeError):
    """An iterative solver failed to reach its tolerance."""


class ConfigError(LatticeKmsError, ValueError):
    """An experiment configuration failed schema validation."""
