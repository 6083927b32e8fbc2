"""Simulation and Schmidt-mode analysis of Bragg-scattering frequency translation in fiber."""
from .errors import (BasisFailureError, ConditioningError, ConfigurationError, DomainError,
                     ModeCutoffError, NumericalError, QFTBSError, ResolutionError, TruncationError)

__all__ = [
    "QFTBSError", "ConfigurationError", "ResolutionError", "DomainError", "ModeCutoffError",
    "NumericalError", "BasisFailureError", "ConditioningError", "TruncationError",
]
