"""Input checks shared by the estimator wrapper."""
from __future__ import annotations

import numpy as np

from .errors import ConfigurationError


def check_complex_2d(X, n_features: int | None = None, name: str = "X") -> np.ndarray:
    """Return ``X`` as a finite complex ``(n_samples, n_features)`` array.

    A 1-D input is treated as a single sample.  sklearn's ``check_array``
    rejects complex data, hence this small replacement.
    """
    arr = np.asarray(X)
    if arr.dtype == object:
        raise ConfigurationError(f"{name} must be numeric")
    arr = arr.astype(complex, copy=False)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2:
        raise ConfigurationError(f"{name} must be 1-D or 2-D, got {arr.ndim} dimensions")
    if arr.shape[0] == 0:
        raise ConfigurationError(f"{name} has no samples")
    if not np.all(np.isfinite(arr)):
        raise ConfigurationError(f"{name} contains NaN or infinity")
    if n_features is not None and arr.shape[1] != n_features:
        raise ConfigurationError(f"{name} has {arr.shape[1]} features, expected {n_features}")
    return arr


def check_positive(value, name: str, allow_none: bool = False):
    if value is None and allow_none:
        return None
    if not isinstance(value, (int, float, np.integer, np.floating)) or not value > 0:
        raise ConfigurationError(f"{name} must be a positive number, got {value!r}")
    return value
