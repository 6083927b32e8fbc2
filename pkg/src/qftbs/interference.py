"""Two-colour Hong-Ou-Mandel statistics for one green and one blue input photon.

Output wavefunctions are named ``<source photon><output band>`` like the
Green blocks: ``gb`` is the blue-band part of the photon that entered green.
The coincidence amplitude is ``gg(w_g) bb(w_b) + bg(w_g) gb(w_b)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, TruncationError
from .green import GreenMatrix, SchmidtDecomposition
from .mesh import TemporalMesh, hg_matrix
from .ssfm import PumpRecord, _signal_core

TRUNCATION_LIMIT = 0.01


def hom_singular_values(schmidt: SchmidtDecomposition) -> np.ndarray:
    """``sigma_n = 2 rho_n tau_n``; one means perfect two-colour interference."""
    return 2.0 * schmidt.rho * schmidt.tau


@dataclass(frozen=True)
class BiPhotonOutput:
    gg: np.ndarray
    gb: np.ndarray
    bg: np.ndarray
    bb: np.ndarray
    weight: float = 1.0
    provenance: dict = field(default_factory=dict)

    def inner(self, a, b) -> complex:
        return self.weight * np.vdot(a, b)

    def norm_sq(self, a) -> float:
        return float(self.weight * np.sum(np.abs(a) ** 2))


def _as_coefficients(x, green: GreenMatrix, mesh: TemporalMesh | None, label: str):
    x = np.asarray(x, dtype=complex)
    m = green.valid_dim
    if mesh is None:
        if x.shape != (m,):
            raise ConfigurationError(f"{label} needs {m} basis coefficients, got shape {x.shape}")
        return x / np.linalg.norm(x)
    psi = hg_matrix(green.basis, mesh, m)
    c = mesh.dt * (psi.T @ x)
    total = mesh.norm_sq(x)
    lost = 1.0 - np.sum(np.abs(c) ** 2) / total
    if lost > TRUNCATION_LIMIT:
        raise TruncationError(f"{label}: {lost:.2%} of the photon lies outside the valid basis")
    return c / np.linalg.norm(c)


def output_components(green_in, blue_in, green: GreenMatrix,
                      mesh: TemporalMesh | None = None) -> BiPhotonOutput:
    """Apply the Green matrix to one photon per band.

    Inputs are basis coefficients over the valid sub-space, or time samples when
    ``mesh`` is given (then projected, rejecting more than 1% truncation).
    """
    cg = _as_coefficients(green_in, green, mesh, "green input")
    cb = _as_coefficients(blue_in, green, mesh, "blue input")
    return BiPhotonOutput(green.gg @ cg, green.gb @ cg, green.bg @ cb, green.bb @ cb,
                          provenance={"route": "green-matrix", "modes": green.valid_dim})


def from_fields(gg, gb, bg, bb, mesh: TemporalMesh) -> BiPhotonOutput:
    """Wrap propagated time envelopes; overlaps are then frequency quadratures."""
    spec = [mesh.to_spectrum(np.asarray(a, dtype=complex)) for a in (gg, gb, bg, bb)]
    return BiPhotonOutput(*spec, weight=mesh.dt, provenance={"route": "quadrature"})


def p11(out: BiPhotonOutput) -> float:
    cross = out.inner(out.gg, out.bg) * out.inner(out.bb, out.gb)
    return float(out.norm_sq(out.gg) * out.norm_sq(out.bb)
                 + out.norm_sq(out.gb) * out.norm_sq(out.bg) + 2.0 * cross.real)


def p20_p02(out: BiPhotonOutput) -> tuple[float, float]:
    p20 = abs(out.inner(out.gg, out.bg)) ** 2 + out.norm_sq(out.gg) * out.norm_sq(out.bg)
    p02 = abs(out.inner(out.gb, out.bb)) ** 2 + out.norm_sq(out.gb) * out.norm_sq(out.bb)
    return float(p20), float(p02)


@dataclass(frozen=True)
class InterferenceTrace:
    z: np.ndarray
    p11: np.ndarray
    p20: np.ndarray
    p02: np.ndarray

    @property
    def total(self) -> np.ndarray:
        return self.p11 + self.p20 + self.p02

    def minimum(self) -> tuple[float, float]:
        """Smallest coincidence probability and the length where it occurs."""
        k = int(np.argmin(self.p11))
        return float(self.p11[k]), float(self.z[k])


def p11_vs_length(record: PumpRecord, green_in, blue_in) -> InterferenceTrace:
    """Coincidence and bunching probabilities after every step along the fiber.

    Inputs are photon-flux envelopes on the record mesh; each is normalized
    to a single photon.
    """
    mesh = record.mesh
    g = np.asarray(green_in, dtype=complex)
    b = np.asarray(blue_in, dtype=complex)
    if g.shape != (mesh.n_points,) or b.shape != (mesh.n_points,):
        raise ConfigurationError("signal photons must be 1-D envelopes on the record mesh")
    g = g / np.sqrt(mesh.norm_sq(g))
    b = b / np.sqrt(mesh.norm_sq(b))
    zero = np.zeros_like(g)
    gin = np.column_stack([g, zero])
    bin_ = np.column_stack([zero, b])
    rows = []

    def watch(step, z, gg, bb):
        out = BiPhotonOutput(gg[:, 0], bb[:, 0], gg[:, 1], bb[:, 1], weight=mesh.dt)
        rows.append((p11(out), *p20_p02(out)))

    _signal_core(record, gin, bin_, watch)
    arr = np.array(rows)
    return InterferenceTrace(record.z, arr[:, 0], arr[:, 1], arr[:, 2])
