"""Exception types shared across the package."""


class ScatmodesError(Exception):
    """Base class for all package-specific errors."""


class UnsupportedRuleSize(ScatmodesError, ValueError):
    """Requested point count is not an available Lebedev size."""


class InsufficientQuadrature(ScatmodesError, ValueError):
    """Quadrature rule cannot exactly integrate the requested harmonic content."""


class ZeroContrast(ScatmodesError, ValueError):
    """Dielectric contrast is one; there is nothing to scatter from."""


class SingularImpedance(ScatmodesError, RuntimeError):
    """Impedance matrix factorization failed."""


class RankDeficientR(ScatmodesError, RuntimeError):
    """Radiation matrix has no numerically radiating subspace."""


class BelowSignificanceThreshold(ScatmodesError, ValueError):
    """Mode is too weak for the requested reconstruction."""


class AlreadyWeighted(ScatmodesError, ValueError):
    """Quadrature weights were already applied to this matrix."""


class RuleNotInversionSymmetric(ScatmodesError, ValueError):
    """Operation needs a rule closed under direction inversion."""


class RuleMismatch(ScatmodesError, ValueError):
    """Mode sets in a sweep do not share the same quadrature rule."""


class EigensolverFailure(ScatmodesError, RuntimeError):
    """Dense eigendecomposition did not converge."""


class ParseError(ScatmodesError, ValueError):
    """Dataset file is malformed."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DimensionMismatch(ScatmodesError, ValueError):
    """Dataset body does not match the dimensions promised by its header."""
