"""Perturbative (first-order) Schmidt modes for Gaussian pumps.

Spectral functions follow the ``exp(+i w t)`` synthesis convention of the
closed-form model.  Helpers ending in ``_time`` return envelopes on a mesh in
the package convention, where they can be compared with numerical modes.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import log, pi, sqrt

import numpy as np

from .errors import ConfigurationError, DomainError
from .fiber import Carriers, DispersionProfile

SINC_GAUSS_C = 0.3858


@dataclass(frozen=True)
class AnalyticParams:
    """Pump width ``sigma`` [s], relative slowness ``beta1`` [s/m], strength ``gamma * p0 * L``."""

    sigma: float
    beta1: float
    gamma_p0_L: float
    L: float
    beta2: float = 0.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise ConfigurationError("sigma must be positive")
        if not self.L > 0:
            raise ConfigurationError("fiber length must be positive")
        if self.beta1 == 0:
            raise DomainError("zero relative group slowness: the walk-off kernel degenerates")

    @property
    def walkoff(self) -> float:
        """Walk-off scale ``beta`` (the sign of ``beta1`` drops out of the kernel)."""
        return sqrt(SINC_GAUSS_C) * abs(self.beta1) * self.L / 2.0

    @property
    def mu(self) -> float:
        b = self.walkoff
        return (self.sigma - b) / (self.sigma + b)

    @property
    def t0(self) -> float:
        return sqrt(2.0 * self.walkoff * self.sigma)

    @property
    def gamma_p0(self) -> float:
        return self.gamma_p0_L / self.L

    @property
    def mode_fwhm(self) -> float:
        """Amplitude FWHM of the lowest time-domain mode."""
        return 2.0 * sqrt(2.0 * log(2.0)) * self.t0

    @classmethod
    def from_pumps(cls, pump_fwhm: float, peak_power: float, gamma: float, beta1: float,
                   L: float, beta2: float = 0.0) -> "AnalyticParams":
        """Two identical Gaussian pumps with the given intensity FWHM.

        Each amplitude is ``exp(-2 ln2 t^2 / T^2)``, so the product is
        ``p0 exp(-t^2 / tau^2)`` with ``tau = T / (2 sqrt(ln 2))`` and ``sigma = tau / sqrt(2)``.
        """
        tau = pump_fwhm / (2.0 * sqrt(log(2.0)))
        return cls(tau / sqrt(2.0), beta1, gamma * peak_power * L, L, beta2)


def relative_slowness(profile: DispersionProfile, carriers: Carriers) -> tuple[float, float]:
    """Half-differences ``(beta1, beta2)`` of the green and blue dispersion coefficients."""
    w = carriers.omegas
    dg = profile.derivatives(w["g"], 2)
    db = profile.derivatives(w["b"], 2)
    return 0.5 * (dg[0] - db[0]), 0.5 * (dg[1] - db[1])


def coupling_spectrum(params: AnalyticParams, omega):
    s = params.sigma
    return params.gamma_p0 * s * sqrt(2.0 / pi) * np.exp(-0.5 * s * s * np.asarray(omega) ** 2)


def integrated_kernel(params: AnalyticParams, omega_g, omega_b, form: str = "exact"):
    """Length-integrated first-order kernel ``K(w_g, w_b)``.

    ``form="exact"`` keeps the sinc and ``beta2``; ``form="gaussian"`` replaces
    the sinc by ``exp(-c x^2 / 2)`` and drops ``beta2``.
    """
    wg = np.asarray(omega_g, dtype=float)
    wb = np.asarray(omega_b, dtype=float)
    s, L, b1 = params.sigma, params.L, params.beta1
    amp = params.gamma_p0_L * s * sqrt(2.0 / pi)
    if form == "exact":
        half = b1 * L * (wg + wb) / 2.0 + params.beta2 * L * (wg ** 2 - wb ** 2) / 4.0
        return amp * np.exp(-1j * half) * np.exp(-0.5 * s * s * (wg - wb) ** 2) * np.sinc(half / pi)
    if form == "gaussian":
        bw = params.walkoff
        env = np.exp(-0.5 * s * s * (wg - wb) ** 2 - 0.5 * bw * bw * (wg + wb) ** 2)
        return amp * np.exp(-0.5j * b1 * L * (wg + wb)) * env
    raise ConfigurationError(f"unknown kernel form {form!r}")


def backward_kernel(params: AnalyticParams, omega_b, omega_g, form: str = "exact"):
    """Blue-to-green kernel, the conjugate of the forward kernel with indices swapped."""
    return np.conj(integrated_kernel(params, omega_g, omega_b, form))


def hg_sequence(n_max: int, x):
    """Yield the unit-scaled Hermite-Gauss functions ``psi_0 .. psi_{n_max-1}`` at ``x``.

    Uses the normalized three-term recursion, which stays finite for large
    orders where ``2^n n!`` overflows.
    """
    x = np.asarray(x, dtype=float)
    prev = np.zeros_like(x)
    cur = pi ** -0.25 * np.exp(-0.5 * x * x)
    for k in range(n_max):
        yield cur
        prev, cur = cur, sqrt(2.0 / (k + 1)) * x * cur - sqrt(k / (k + 1)) * prev


def hg_function(n: int, x) -> np.ndarray:
    """Unit-scaled Hermite-Gauss function ``psi_n(x)``."""
    if n < 0:
        raise ConfigurationError("Hermite-Gauss order must be non-negative")
    for psi in hg_sequence(n + 1, x):
        pass
    return psi


@dataclass(frozen=True)
class MehlerDecomposition:
    params: AnalyticParams
    lambdas: np.ndarray

    @property
    def mu(self) -> float:
        return self.params.mu

    def phi(self, n: int, omega) -> np.ndarray:
        t0 = self.params.t0
        return sqrt(t0) * hg_function(n, t0 * np.asarray(omega))

    def reconstruct(self, omega_g, omega_b) -> np.ndarray:
        """Truncated sum approximating the Gaussian-form kernel."""
        wg = np.asarray(omega_g, dtype=float)
        wb = np.asarray(omega_b, dtype=float)
        sign = 1.0 if self.mu >= 0 else -1.0
        t0 = self.params.t0
        total = np.zeros(np.broadcast(wg, wb).shape)
        terms = zip(self.lambdas, hg_sequence(len(self.lambdas), t0 * wg),
                    hg_sequence(len(self.lambdas), t0 * wb))
        for n, (lam, pg, pb) in enumerate(terms):
            total = total + (lam * sign ** n * t0) * pg * pb
        return np.exp(-0.5j * self.params.beta1 * self.params.L * (wg + wb)) * total


def mehler_decomposition(params: AnalyticParams, n_max: int = 25) -> MehlerDecomposition:
    """Singular values ``lambda_n`` of the Gaussian-form kernel.

    For negative ``mu`` the blue-side functions pick up ``(-1)^n``; the singular
    values only depend on ``|mu|``.  When ``mu == 0`` a single term is returned.
    """
    mu = params.mu
    if not abs(mu) < 1:
        raise DomainError("Mehler ratio must satisfy |mu| < 1")
    lam0 = params.gamma_p0_L * sqrt(params.sigma / params.walkoff * (1.0 - mu * mu))
    n = 1 if mu == 0 else n_max
    return MehlerDecomposition(params, lam0 * abs(mu) ** np.arange(n))


def analytic_modes(params: AnalyticParams, n: int, omega) -> dict[str, np.ndarray]:
    """Spectral input (``V``, ``W``) and output (``v``, ``w``) functions of order ``n``."""
    w = np.asarray(omega, dtype=float)
    phi = sqrt(params.t0) * hg_function(n, params.t0 * w)
    shift = 0.5 * params.beta1 * params.L * w
    return {
        "V": phi * np.exp(1j * shift),
        "W": phi * np.exp(-1j * shift),
        "v": phi * np.exp(-1j * shift),
        "w": phi * np.exp(1j * shift),
    }


def analytic_modes_time(params: AnalyticParams, n: int, t) -> dict[str, np.ndarray]:
    """Time-domain mode envelopes (global phase dropped).

    The green input is centred at ``-beta1 L / 2`` and the blue input at
    ``+beta1 L / 2``; outputs swap those positions.
    """
    t = np.asarray(t, dtype=float)
    t0 = params.t0
    d = 0.5 * params.beta1 * params.L

    def at(center):
        return hg_function(n, (t - center) / t0) / sqrt(t0) + 0j

    return {"V": at(-d), "W": at(d), "v": at(d), "w": at(-d)}


def overlap_with_numeric(analytic, numeric) -> float:
    """Phase-insensitive fidelity ``|<a, b>|^2`` of two sampled modes after normalization."""
    a = np.asarray(analytic, dtype=complex).ravel()
    b = np.asarray(numeric, dtype=complex).ravel()
    if a.shape != b.shape:
        raise ConfigurationError("modes are sampled on different grids")
    na, nb = np.vdot(a, a).real, np.vdot(b, b).real
    if na == 0 or nb == 0:
        raise ConfigurationError("cannot compare a zero mode")
    return float(abs(np.vdot(a, b)) ** 2 / (na * nb))
