"""scikit-learn style wrapper around a frequency-translation case.

``fit`` runs the pump simulation and extracts the Green matrix and its Schmidt
decomposition; ``transform`` applies the fitted map to HG coefficient vectors.
Rows of ``X`` are samples laid out as ``[green coefficients | blue coefficients]``.
"""
from __future__ import annotations

from dataclasses import replace

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_complex_2d, check_positive
from .cases import PS, Case
from .config import CaseConfig, load_config
from .errors import ConfigurationError
from .green import compute_green, optimal_timescale, schmidt_decompose, valid_submatrix
from .interference import hom_singular_values


class FrequencyTranslator(BaseEstimator, TransformerMixin):
    """Learn the linear signal map of one pump configuration.

    Parameters
    ----------
    config : CaseConfig or path
        Physical case; the experiment field is ignored.
    t_char : float or None
        Basis width in seconds; ``None`` fits it self-consistently.
    n_modes, n_steps : int or None
        Optional overrides of the config.
    unitarity_tol : float
        Threshold for the valid input sub-space.
    n_jobs : int
        Worker processes for the basis propagations.
    """

    def __init__(self, config=None, t_char=None, n_modes=None, n_steps=None,
                 unitarity_tol=1e-2, n_jobs=1):
        self.config = config
        self.t_char = t_char
        self.n_modes = n_modes
        self.n_steps = n_steps
        self.unitarity_tol = unitarity_tol
        self.n_jobs = n_jobs

    def _case(self) -> Case:
        cfg = self.config
        if cfg is None:
            cfg = CaseConfig(experiment="green")
        elif not isinstance(cfg, CaseConfig):
            cfg = load_config(cfg)
        if self.n_modes is not None:
            cfg = replace(cfg, basis=replace(cfg.basis, n_modes=int(self.n_modes)))
        if self.n_steps is not None:
            cfg = replace(cfg, solver=replace(cfg.solver, n_steps=int(self.n_steps)))
        return Case(cfg)

    def fit(self, X=None, y=None):
        """Simulate the pumps and extract the Green matrix; ``X`` and ``y`` are ignored."""
        check_positive(self.t_char, "t_char", allow_none=True)
        check_positive(self.unitarity_tol, "unitarity_tol")
        if int(self.n_jobs) < 1:
            raise ConfigurationError("n_jobs must be >= 1")
        case = self._case()
        t_char = self.t_char
        if t_char is None:
            b = case.config.basis
            t_char = optimal_timescale(case.record, b.t_char_start_ps * PS, b.n_modes,
                                       b.center_ps * PS, unitarity_tol=self.unitarity_tol,
                                       jobs=int(self.n_jobs)).t_char
        full = compute_green(case.record, case.basis(t_char), jobs=int(self.n_jobs))
        self.green_ = valid_submatrix(full, self.unitarity_tol)
        self.schmidt_ = schmidt_decompose(self.green_)
        self.t_char_ = t_char
        self.n_features_in_ = 2 * self.green_.valid_dim
        self.n_out_ = self.green_.n_out
        return self

    def transform(self, X):
        """Output coefficients ``[green | blue]`` for each input row."""
        check_is_fitted(self, "green_")
        X = check_complex_2d(X, self.n_features_in_)
        return X @ self.green_.stacked().T

    def inverse_transform(self, Y):
        """Backward map (conjugate transpose), exact on the valid sub-space."""
        check_is_fitted(self, "green_")
        Y = check_complex_2d(Y, 2 * self.n_out_, "Y")
        return Y @ self.green_.backward().T

    def efficiencies(self) -> np.ndarray:
        check_is_fitted(self, "schmidt_")
        return self.schmidt_.rho ** 2

    def hom_singular_values(self) -> np.ndarray:
        check_is_fitted(self, "schmidt_")
        return hom_singular_values(self.schmidt_)
