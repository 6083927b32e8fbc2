"""Time/frequency grids, pulse constructors and the Hermite-Gauss basis.

Conventions used throughout the package:

* time samples are centred, ``t_k = (k - N/2) * dt``;
* a time envelope is synthesised from its spectrum as
  ``A(t) = sum_w S(w) exp(-i w t)``, so positive ``w`` means a higher optical
  frequency and ``spectrum = ifft(A)``;
* the discrete inner product is ``<a, b> = dt * sum(conj(a) * b)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import log, pi, sqrt

import numpy as np
from scipy.constants import c as SPEED_OF_LIGHT, hbar

from .errors import ConfigurationError, ResolutionError

BANDS = ("p", "q", "g", "b")
FWHM_PER_SCALE = 2.0 * sqrt(2.0 * log(2.0))


@dataclass(frozen=True)
class TemporalMesh:
    """Uniform time grid shared by all four bands.

    ``frame`` names the band whose group velocity defines the co-moving
    frame; dispersion operators subtract that band's group slowness.
    """

    n_points: int
    window: float
    frame: str = "p"

    def __post_init__(self):
        n = self.n_points
        if not isinstance(n, (int, np.integer)) or n < 2 or n & (n - 1):
            raise ConfigurationError(f"n_points must be a power of two >= 2, got {n!r}")
        if not self.window > 0:
            raise ConfigurationError(f"window must be positive, got {self.window!r}")
        if self.frame not in BANDS:
            raise ConfigurationError(f"unknown frame band {self.frame!r}")

    @property
    def dt(self) -> float:
        return self.window / self.n_points

    @property
    def d_omega(self) -> float:
        return 2.0 * pi / self.window

    @property
    def t(self) -> np.ndarray:
        return (np.arange(self.n_points) - self.n_points // 2) * self.dt

    @property
    def omega(self) -> np.ndarray:
        """Angular envelope frequencies in FFT order."""
        return 2.0 * pi * np.fft.fftfreq(self.n_points, d=self.dt)

    @property
    def nyquist(self) -> float:
        return pi / self.dt

    def to_spectrum(self, samples: np.ndarray) -> np.ndarray:
        """Unitary transform along the first axis (``ifft`` with ortho norm)."""
        return np.fft.ifft(samples, axis=0, norm="ortho")

    def to_time(self, spectrum: np.ndarray) -> np.ndarray:
        return np.fft.fft(spectrum, axis=0, norm="ortho")

    def inner(self, a: np.ndarray, b: np.ndarray) -> complex:
        return self.dt * np.vdot(a, b)

    def norm_sq(self, samples: np.ndarray) -> float:
        """Time-integrated ``|A|^2`` along the first axis."""
        return self.dt * np.sum(np.abs(samples) ** 2, axis=0)


def make_mesh(n_points: int, window: float, frame: str = "p") -> TemporalMesh:
    return TemporalMesh(int(n_points), float(window), frame)


@dataclass(frozen=True)
class FieldEnvelope:
    """Slowly varying complex amplitude of one band, in W^(1/2)."""

    band: str
    carrier_wavelength: float
    samples: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.band not in BANDS:
            raise ConfigurationError(f"unknown band {self.band!r}")
        if not self.carrier_wavelength > 0:
            raise ConfigurationError("carrier wavelength must be positive")
        arr = np.array(self.samples, dtype=complex)
        if arr.ndim != 1:
            raise ConfigurationError("envelope samples must be one-dimensional")
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)

    @property
    def carrier_omega(self) -> float:
        return 2.0 * pi * SPEED_OF_LIGHT / self.carrier_wavelength

    def check_mesh(self, mesh: TemporalMesh) -> None:
        if self.samples.shape[0] != mesh.n_points:
            raise ConfigurationError(
                f"envelope has {self.samples.shape[0]} samples, mesh has {mesh.n_points}"
            )

    def photon_number(self, mesh: TemporalMesh) -> float:
        self.check_mesh(mesh)
        return float(mesh.norm_sq(self.samples)) / (hbar * self.carrier_omega)


@dataclass(frozen=True)
class HGBasis:
    """Hermite-Gauss basis described by the amplitude FWHM of its lowest mode."""

    t_char: float
    center: float = 0.0
    n_modes: int = 25

    def __post_init__(self):
        if not self.t_char > 0:
            raise ConfigurationError("t_char must be positive")
        if self.n_modes < 1:
            raise ConfigurationError("n_modes must be >= 1")

    @property
    def scale(self) -> float:
        """Gaussian scale s in exp(-t^2 / 2 s^2)."""
        return self.t_char / FWHM_PER_SCALE


def check_basis(basis: HGBasis, mesh: TemporalMesh, n_modes: int | None = None) -> None:
    """Raise ResolutionError unless every requested mode fits the mesh."""
    n = basis.n_modes if n_modes is None else n_modes
    s = basis.scale
    if basis.t_char < 4.0 * mesh.dt:
        raise ResolutionError(
            f"t_char={basis.t_char:.3e} s is under 4 samples (dt={mesh.dt:.3e} s)"
        )
    # classical turning point of the highest mode plus a decay margin
    reach = (sqrt(2.0 * (n - 1) + 1.0) + 4.0) * s
    half = mesh.window / 2.0
    if abs(basis.center) + reach > half:
        raise ResolutionError(
            f"HG mode {n - 1} (reach {reach:.3e} s) leaks outside the window"
        )
    if (sqrt(2.0 * (n - 1) + 1.0) + 4.0) / s > 0.9 * mesh.nyquist:
        raise ResolutionError(f"HG mode {n - 1} is not band-limited by the mesh")


def hg_matrix(basis: HGBasis, mesh: TemporalMesh, n_modes: int | None = None,
              check: bool = True) -> np.ndarray:
    """All basis functions as columns of an ``(n_points, n_modes)`` array.

    Uses the stable three-term recursion; every column is rescaled to unit
    discrete norm.
    """
    n = basis.n_modes if n_modes is None else n_modes
    if check:
        check_basis(basis, mesh, n)
    s = basis.scale
    x = (mesh.t - basis.center) / s
    out = np.empty((mesh.n_points, n))
    out[:, 0] = pi ** -0.25 * np.exp(-0.5 * x * x)
    if n > 1:
        out[:, 1] = sqrt(2.0) * x * out[:, 0]
    for k in range(1, n - 1):
        out[:, k + 1] = sqrt(2.0 / (k + 1)) * x * out[:, k] - sqrt(k / (k + 1)) * out[:, k - 1]
    out /= sqrt(s)
    out /= np.sqrt(mesh.norm_sq(out))
    return out


def hermite_gauss(n: int, basis: HGBasis, mesh: TemporalMesh) -> np.ndarray:
    if n < 0:
        raise ConfigurationError("mode index must be non-negative")
    return hg_matrix(basis, mesh, n + 1)[:, n]


def gaussian_pulse(fwhm_intensity: float, peak_power: float, delay: float,
                   mesh: TemporalMesh) -> np.ndarray:
    """Transform-limited Gaussian whose intensity has the given FWHM."""
    if not fwhm_intensity > 0:
        raise ConfigurationError("fwhm must be positive")
    if peak_power < 0:
        raise ConfigurationError("peak power must be non-negative")
    if fwhm_intensity < 4.0 * mesh.dt:
        raise ResolutionError(f"fwhm {fwhm_intensity:.3e} s not resolved (dt={mesh.dt:.3e} s)")
    if abs(delay) + 3.0 * fwhm_intensity > mesh.window / 2.0:
        raise ResolutionError("pulse does not fit inside the time window")
    tau = mesh.t - delay
    return np.sqrt(peak_power) * np.exp(-2.0 * log(2.0) * tau * tau / fwhm_intensity ** 2) + 0j


def project(samples: np.ndarray, basis: HGBasis, mesh: TemporalMesh,
            modes: np.ndarray | None = None) -> tuple[np.ndarray, float]:
    """HG coefficients of an envelope and the relative reconstruction residual.

    ``samples`` may be 2-D with one envelope per column; the residual is then
    the largest over columns.
    """
    psi = hg_matrix(basis, mesh) if modes is None else modes
    a = np.asarray(samples, dtype=complex)
    coeffs = mesh.dt * (psi.T @ a)
    rest = a - psi @ coeffs
    norm = np.sqrt(mesh.norm_sq(a))
    resid = np.sqrt(mesh.norm_sq(rest)) / np.where(norm > 0, norm, 1.0)
    return coeffs, float(np.max(resid))


def reconstruct(coeffs: np.ndarray, basis: HGBasis, mesh: TemporalMesh,
                modes: np.ndarray | None = None) -> np.ndarray:
    psi = hg_matrix(basis, mesh, len(coeffs)) if modes is None else modes[:, : len(coeffs)]
    return psi @ np.asarray(coeffs, dtype=complex)
