"""
Exception hierarchy for the groenewold services.

The management commands map these onto process exit codes:
ConfigurationError (and plain ValueError) -> 2, NumericalError -> 3,
NormalizationError -> 4.
"""


class GroenewoldError(Exception):
    """Base class for every error raised by the groenewold services."""


class ConfigurationError(GroenewoldError, ValueError):
    """Malformed run configuration or density spec."""


class BasisMismatchError(GroenewoldError, ValueError):
    """Operands live on different truncated Fock bases."""


class NormalizationError(GroenewoldError):
    """A density failed the unit-normalisation gate."""


class NumericalError(GroenewoldError):
    """A computation could not reach its declared accuracy."""


class QuadratureConvergenceError(NumericalError):
    """Successive quadrature refinements kept disagreeing up to the point cap."""


class PrecisionLimitError(NumericalError):
    """A polynomial degree or Fock index is beyond the supported ceiling."""


class InsufficientTruncationError(NumericalError):
    """The Fock truncation is too small for the requested bound."""


class SymmetryViolationError(NumericalError):
    """A matrix that must be real symmetric is not."""


class TruncationError(NumericalError):
    """The truncated trace misses 1 by more than the declared tolerance."""


class EigensolverError(NumericalError):
    """The Jacobi sweeps did not converge."""


class MomentDivergenceError(NumericalError):
    """A second moment of a density does not exist."""
