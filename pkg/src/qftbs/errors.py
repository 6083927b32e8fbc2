"""Exception hierarchy for qftbs."""


class QFTBSError(Exception):
    """Base class for all package errors."""


class ConfigurationError(QFTBSError, ValueError):
    """Invalid parameters, mismatched meshes or malformed configuration."""


class ResolutionError(QFTBSError):
    """A field or basis is not resolved by the mesh (aliasing or window leakage)."""


class DomainError(QFTBSError, ValueError):
    """Argument outside the validity range of a model (wavelength, table)."""


class ModeCutoffError(QFTBSError):
    """No guided fundamental mode at the requested wavelength."""


class NumericalError(QFTBSError):
    """Root finding, SVD or fitting failed to converge."""


class BasisFailureError(NumericalError):
    """No input mode passes the unitarity test; basis window or size is wrong."""


class ConditioningError(NumericalError):
    """Input matrix too ill-conditioned to invert."""


class TruncationError(QFTBSError):
    """Input carries more than the allowed energy outside the basis span."""
