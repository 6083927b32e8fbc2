"""Closed-form two-mode (monochromatic) Bragg-scattering model."""
from __future__ import annotations

from dataclasses import dataclass
from math import sqrt

import numpy as np

from .errors import ConfigurationError

SERIES_THRESHOLD = 1e-6


@dataclass(frozen=True)
class TwoModeParams:
    delta_beta: float
    kappa: complex
    z: float

    def __post_init__(self):
        if self.z < 0:
            raise ConfigurationError("propagation distance must be non-negative")

    @property
    def k(self) -> float:
        return sqrt(self.delta_beta ** 2 / 4.0 + abs(self.kappa) ** 2)


@dataclass(frozen=True)
class TwoModeTransfer:
    mu: complex
    nu: complex

    def matrix(self) -> np.ndarray:
        """Map ``(a_g(0), a_b(0)) -> (a_g(z), a_b(z))``."""
        return np.array([[self.mu, self.nu], [-np.conj(self.nu), np.conj(self.mu)]])


def transfer_coefficients(params: TwoModeParams) -> TwoModeTransfer:
    k, z, db, kap = params.k, params.z, params.delta_beta, complex(params.kappa)
    kz = k * z
    if kz < SERIES_THRESHOLD:
        # sin(kz)/k = z (1 - (kz)^2/6), cos(kz) = 1 - (kz)^2/2
        sinc_z = z * (1.0 - kz * kz / 6.0)
        cos_kz = 1.0 - kz * kz / 2.0
    else:
        sinc_z = np.sin(kz) / k
        cos_kz = np.cos(kz)
    mu = cos_kz + 0.5j * db * sinc_z
    nu = 1j * kap * sinc_z
    return TwoModeTransfer(complex(mu), complex(nu))


def generator(params: TwoModeParams) -> np.ndarray:
    """Matrix ``M`` of ``d/dz (a_g, a_b) = M (a_g, a_b)`` from the Heisenberg equations."""
    db, kap = params.delta_beta, complex(params.kappa)
    return 1j * np.array([[db / 2.0, kap], [np.conj(kap), -db / 2.0]])


def hom_output_state(transfer: TwoModeTransfer) -> tuple[complex, complex, complex]:
    """Amplitudes ``(C11, C20, C02)`` of the output for a ``|1,1>`` input."""
    mu, nu = transfer.mu, transfer.nu
    c11 = abs(mu) ** 2 - abs(nu) ** 2
    c20 = sqrt(2.0) * mu * nu
    c02 = -sqrt(2.0) * np.conj(mu) * np.conj(nu)
    return complex(c11), complex(c20), complex(c02)
