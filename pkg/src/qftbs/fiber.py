"""Step-index model of a solid-core photonic crystal fiber.

The cladding is an effective medium, ``n_clad = f + (1 - f) n_core``, with
``n_core`` the bulk index of fused silica.  The propagation constant of the
fundamental HE11 mode comes from the exact (vector) step-index eigenvalue
equation.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import pi
from typing import Callable

import numpy as np
from scipy.constants import c as SPEED_OF_LIGHT
from scipy.optimize import brentq
from scipy.special import jv, kv

from .errors import ConfigurationError, DomainError, ModeCutoffError, NumericalError

# Malitson (1965) fused silica, wavelengths in micrometres
SELLMEIER_B = (0.6961663, 0.4079426, 0.8974794)
SELLMEIER_C = (0.0684043, 0.1162414, 9.896161)
SILICA_RANGE = (0.21e-6, 3.71e-6)


def wavelength_to_omega(wavelength):
    return 2.0 * pi * SPEED_OF_LIGHT / np.asarray(wavelength, dtype=float)


def omega_to_wavelength(omega):
    return 2.0 * pi * SPEED_OF_LIGHT / np.asarray(omega, dtype=float)


def silica_index(wavelength: float) -> float:
    lo, hi = SILICA_RANGE
    if not lo <= wavelength <= hi:
        raise DomainError(f"wavelength {wavelength:.4e} m outside silica model range")
    l2 = (wavelength * 1e6) ** 2
    return float(np.sqrt(1.0 + sum(b * l2 / (l2 - c * c) for b, c in zip(SELLMEIER_B, SELLMEIER_C))))


@dataclass(frozen=True)
class FiberSpec:
    """Air-filling fraction ``f``, core radius ``a`` [m], ``gamma`` [1/(W m)], ``length`` [m]."""

    f: float = 0.494
    a: float = 0.72e-6
    gamma: float = 0.1
    length: float = 20.0

    def __post_init__(self):
        if not 0.0 < self.f < 1.0:
            raise ConfigurationError(f"air-filling fraction must lie in (0, 1), got {self.f}")
        if not self.a > 0:
            raise ConfigurationError("core radius must be positive")
        if self.gamma < 0:
            raise ConfigurationError("gamma must be non-negative")
        if not self.length > 0:
            raise ConfigurationError("length must be positive")


def core_and_clad_index(wavelength: float, f: float = 0.494) -> tuple[float, float]:
    n_core = silica_index(wavelength)
    return n_core, f + (1.0 - f) * n_core


def _he11_residual(u, v, n_co, n_cl):
    w = np.sqrt(v * v - u * u)
    jp = 0.5 * (jv(0, u) - jv(2, u)) / (u * jv(1, u))
    kp = -0.5 * (kv(0, w) + kv(2, w)) / (w * kv(1, w))
    lhs = (jp + kp) * (n_co ** 2 * jp + n_cl ** 2 * kp)
    rhs = (1.0 / u ** 2 + 1.0 / w ** 2) * (n_co ** 2 / u ** 2 + n_cl ** 2 / w ** 2)
    # scale-free form keeps the root well conditioned near u -> 0
    return (lhs - rhs) * u ** 4


@lru_cache(maxsize=65536)
def _effective_index(wavelength: float, f: float, a: float) -> float:
    n_co, n_cl = core_and_clad_index(wavelength, f)
    k0 = 2.0 * pi / wavelength
    v = k0 * a * np.sqrt(n_co ** 2 - n_cl ** 2)
    u_hi = min(v, 3.8317) * (1.0 - 1e-12)
    grid = np.linspace(1e-3 * u_hi, u_hi, 80)
    vals = _he11_residual(grid, v, n_co, n_cl)
    for i in range(len(grid) - 1):
        a0, a1 = vals[i], vals[i + 1]
        if np.isfinite(a0) and np.isfinite(a1) and a0 * a1 < 0:
            try:
                u = brentq(_he11_residual, grid[i], grid[i + 1],
                           args=(v, n_co, n_cl), xtol=1e-15, rtol=1e-15, maxiter=200)
            except (RuntimeError, ValueError) as exc:
                raise NumericalError(f"HE11 root finding failed at {wavelength:.4e} m") from exc
            n_eff = float(np.sqrt(n_co ** 2 - (u / (k0 * a)) ** 2))
            if not n_cl < n_eff < n_co:
                raise NumericalError("effective index violates the guidance bound")
            return n_eff
    raise ModeCutoffError(f"no guided HE11 root at {wavelength:.4e} m (V={v:.3f})")


def effective_index(fiber: FiberSpec, wavelength: float) -> float:
    return _effective_index(float(wavelength), fiber.f, fiber.a)


def solve_beta(fiber: FiberSpec, wavelength: float) -> float:
    """Propagation constant [rad/m] of the fundamental mode."""
    return 2.0 * pi / wavelength * effective_index(fiber, wavelength)


# stencil coefficients on the half-step grid x + k h/2, k = -4..4
_STENCILS = {
    1: {1: 0.5, -1: -0.5},
    2: {1: 1.0, 0: -2.0, -1: 1.0},
    3: {2: 0.5, 1: -1.0, -1: 1.0, -2: -0.5},
    4: {2: 1.0, 1: -4.0, 0: 6.0, -1: -4.0, -2: 1.0},
}


@dataclass(frozen=True)
class DispersionProfile:
    """``beta(omega)`` over an angular-frequency range with derivative access.

    ``rel_step`` is the finite-difference step relative to ``omega0``; each
    central difference is Richardson-extrapolated from steps ``h`` and ``h/2``.
    """

    beta_fn: Callable[[float], float] = field(repr=False)
    omega_min: float
    omega_max: float
    rel_step: float = 1e-3

    @classmethod
    def from_fiber(cls, fiber: FiberSpec, wl_min: float = 0.45e-6, wl_max: float = 2.0e-6,
                   rel_step: float = 1e-3) -> "DispersionProfile":
        def beta(omega):
            return solve_beta(fiber, float(omega_to_wavelength(omega)))
        return cls(beta, float(wavelength_to_omega(wl_max)), float(wavelength_to_omega(wl_min)), rel_step)

    def beta(self, omega):
        omega = np.asarray(omega, dtype=float)
        if np.any(omega < self.omega_min) or np.any(omega > self.omega_max):
            raise DomainError("frequency outside the tabulated dispersion range")
        if omega.ndim == 0:
            return float(self.beta_fn(float(omega)))
        return np.array([self.beta_fn(float(w)) for w in omega])

    def table(self, omega_grid) -> np.ndarray:
        return self.beta(omega_grid)

    def derivatives(self, omega0: float, n_max: int = 4) -> np.ndarray:
        """``[beta^(1), ..., beta^(n_max)]`` at ``omega0``."""
        if not 1 <= n_max <= 4:
            raise ConfigurationError("n_max must be between 1 and 4")
        h = self.rel_step * omega0
        if omega0 - 2.0 * h < self.omega_min or omega0 + 2.0 * h > self.omega_max:
            raise DomainError("insufficient table margin for the derivative stencil")
        f = {k: self.beta_fn(omega0 + 0.5 * k * h) for k in range(-4, 5)}
        out = []
        for n in range(1, n_max + 1):
            coarse = sum(w * f[2 * k] for k, w in _STENCILS[n].items()) / h ** n
            fine = sum(w * f[k] for k, w in _STENCILS[n].items()) / (0.5 * h) ** n
            out.append((4.0 * fine - coarse) / 3.0)
        return np.array(out)


def beta_derivatives(profile: DispersionProfile, omega0: float, n_max: int = 4) -> np.ndarray:
    return profile.derivatives(omega0, n_max)


def group_velocity(profile: DispersionProfile, wavelength: float) -> float:
    return 1.0 / profile.derivatives(float(wavelength_to_omega(wavelength)), 1)[0]


def dispersion_D(profile: DispersionProfile, wavelength) -> np.ndarray | float:
    """Dispersion parameter ``D = -(2 pi c / lambda^2) beta2`` in ps/(nm km)."""
    wl = np.atleast_1d(np.asarray(wavelength, dtype=float))
    out = np.empty_like(wl)
    for i, lam in enumerate(wl):
        beta2 = profile.derivatives(float(wavelength_to_omega(lam)), 2)[1]
        out[i] = -2.0 * pi * SPEED_OF_LIGHT / lam ** 2 * beta2 * 1e6
    return float(out[0]) if np.ndim(wavelength) == 0 else out


def zero_dispersion_wavelength(profile: DispersionProfile, lo: float, hi: float) -> float:
    """Wavelength in ``[lo, hi]`` where ``beta2`` changes sign."""
    def b2(lam):
        return profile.derivatives(float(wavelength_to_omega(lam)), 2)[1]
    grid = np.linspace(lo, hi, 41)
    vals = [b2(x) for x in grid]
    for i in range(len(grid) - 1):
        if vals[i] * vals[i + 1] < 0:
            return brentq(b2, grid[i], grid[i + 1], xtol=1e-13)
    raise NumericalError("no zero-dispersion wavelength in range")


@dataclass(frozen=True)
class Carriers:
    """Carrier wavelengths [m] of the pumps (p, q) and signals (g, b)."""

    p: float
    q: float
    g: float
    b: float

    def __post_init__(self):
        w = self.omegas
        if abs(w["p"] + w["g"] - w["q"] - w["b"]) > 1e-9 * w["p"]:
            raise ConfigurationError("carriers violate omega_p + omega_g = omega_q + omega_b")

    @classmethod
    def from_wavelengths(cls, p: float, q: float, g: float, b: float | None = None) -> "Carriers":
        if b is None:
            wb = wavelength_to_omega(p) + wavelength_to_omega(g) - wavelength_to_omega(q)
            b = float(omega_to_wavelength(wb))
        return cls(float(p), float(q), float(g), float(b))

    @property
    def omegas(self) -> dict[str, float]:
        return {k: float(wavelength_to_omega(getattr(self, k))) for k in "pqgb"}

    def wavelength(self, band: str) -> float:
        return getattr(self, band)


def phase_mismatch(profile: DispersionProfile, gamma: float, power_p: float, power_q: float,
                   carriers: Carriers, detuning=0.0):
    """``beta_p + beta_g - beta_q - beta_b + gamma (P_q - P_p)`` with both signals detuned."""
    w = carriers.omegas
    det = np.asarray(detuning, dtype=float)
    bp, bq = profile.beta(w["p"]), profile.beta(w["q"])
    dbeta = bp - bq + profile.beta(w["g"] + det) - profile.beta(w["b"] + det)
    return dbeta + gamma * (power_q - power_p)


def _central_lobe_fwhm(x, y):
    i0 = int(np.argmax(y))
    half = 0.5 * y[i0]

    def cross(step):
        i = i0
        while 0 < i < len(y) - 1 and y[i + step] > half:
            i += step
        j = i + step
        if not 0 <= j < len(y):
            raise NumericalError("central lobe not contained in the detuning grid")
        return x[i] + (half - y[i]) * (x[j] - x[i]) / (y[j] - y[i])

    return cross(1) - cross(-1)


@dataclass(frozen=True)
class PhaseMatchingCurve:
    detuning: np.ndarray
    values: np.ndarray
    fwhm: float


def phase_matching_curve(profile: DispersionProfile, fiber: FiberSpec, power_p: float,
                         power_q: float, carriers: Carriers, detuning) -> PhaseMatchingCurve:
    det = np.asarray(detuning, dtype=float)
    dbeta = phase_mismatch(profile, fiber.gamma, power_p, power_q, carriers, det)
    vals = np.sinc(dbeta * fiber.length / (2.0 * pi))
    return PhaseMatchingCurve(det, vals, _central_lobe_fwhm(det, vals))


def phase_matched_carriers(profile: DispersionProfile, gamma: float, power_p: float,
                           power_q: float, pump_p: float, pump_q: float, green_guess: float,
                           search: float = 2e12) -> Carriers:
    """Shift the green carrier (blue follows by energy conservation) to zero mismatch.

    Returns the root closest to ``green_guess``.
    """
    base = Carriers.from_wavelengths(pump_p, pump_q, green_guess)

    def mismatch(d):
        return float(phase_mismatch(profile, gamma, power_p, power_q, base, d))

    grid = np.linspace(-search, search, 81)
    vals = np.array([mismatch(d) for d in grid])
    roots = [brentq(mismatch, grid[i], grid[i + 1], xtol=1.0)
             for i in range(len(grid) - 1) if vals[i] * vals[i + 1] < 0]
    if not roots:
        raise NumericalError("no phase-matched green carrier within the search range")
    d = min(roots, key=abs)
    wg = base.omegas["g"] + d
    return Carriers.from_wavelengths(pump_p, pump_q, float(omega_to_wavelength(wg)))
