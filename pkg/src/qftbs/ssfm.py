"""Split-step Fourier propagation of the four coupled Bragg-scattering envelopes.

Pumps are propagated first as classical fields (dispersion, SPM, mutual CPM).
Signals are then propagated through the stored pump evolution.  Their
equations are linear: dispersion, CPM from the pumps and the BS coupling.

Signal equations are integrated on photon-flux amplitudes
``a_j = A_j / sqrt(hbar omega_j)``, where the single-``gamma`` coupling
conserves ``N_g + N_b`` exactly.  Inputs and outputs of
:func:`propagate_signals` are in W^(1/2) like every other envelope.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial
from typing import Callable

import numpy as np
from scipy.constants import hbar

from .errors import ConfigurationError, ResolutionError
from .fiber import Carriers, DispersionProfile, FiberSpec, phase_mismatch
from .mesh import TemporalMesh

ALIAS_BAND = 0.9
ALIAS_LEVEL = 1e-6  # -60 dB


@dataclass(frozen=True)
class PropagationConfig:
    n_steps: int = 400
    store_every: int = 1
    dispersion: bool = True
    spm: bool = True
    cpm: bool = True
    bs: bool = True
    n_max: int = 4

    def __post_init__(self):
        if self.n_steps < 1:
            raise ConfigurationError("n_steps must be >= 1")
        if self.store_every < 1 or self.n_steps % self.store_every:
            raise ConfigurationError("store_every must divide n_steps")
        if not 1 <= self.n_max <= 4:
            raise ConfigurationError("n_max must be between 1 and 4")


def photon_number(samples: np.ndarray, mesh: TemporalMesh, carrier_omega: float):
    """``(1 / hbar omega) * integral |A|^2 dt``; works column-wise on 2-D input."""
    return mesh.norm_sq(np.asarray(samples)) / (hbar * carrier_omega)


def check_aliasing(samples: np.ndarray, mesh: TemporalMesh, label: str) -> None:
    spec = np.abs(mesh.to_spectrum(np.asarray(samples))) ** 2
    if spec.ndim == 1:
        spec = spec[:, None]
    peak = spec.max(axis=0)
    edge = np.abs(mesh.omega) > ALIAS_BAND * mesh.nyquist
    if not edge.any():
        return
    worst = spec[edge].max(axis=0)
    live = peak > 0
    if np.any(worst[live] > ALIAS_LEVEL * peak[live]):
        raise ResolutionError(f"{label}: spectral content near Nyquist above -60 dB")


def dispersion_operators(profile: DispersionProfile, carriers: Carriers, mesh: TemporalMesh,
                         n_max: int = 4) -> dict[str, np.ndarray]:
    """Real wavenumber offsets ``D_j(w)`` [rad/m] in the frame of ``mesh.frame``."""
    w = carriers.omegas
    derivs = {band: profile.derivatives(w[band], n_max) for band in "pqgb"}
    slowness_frame = derivs[mesh.frame][0]
    om = mesh.omega
    ops = {}
    for band, d in derivs.items():
        op = sum(d[n - 1] * om ** n / factorial(n) for n in range(1, n_max + 1))
        ops[band] = op - slowness_frame * om
    return ops


@dataclass(frozen=True)
class _Physics:
    """Everything the stepper needs, precomputed once per (fiber, mesh, carriers, config)."""

    mesh: TemporalMesh
    gamma: float
    dz: float
    config: PropagationConfig
    half_d: dict = field(repr=False)
    delta_beta: float = 0.0

    def half_dispersion(self, band: str, a: np.ndarray) -> np.ndarray:
        if not self.config.dispersion:
            return a
        ph = self.half_d[band]
        if a.ndim == 2:
            ph = ph[:, None]
        return self.mesh.to_time(ph * self.mesh.to_spectrum(a))


def _make_physics(fiber: FiberSpec, mesh: TemporalMesh, carriers: Carriers,
                  profile: DispersionProfile, config: PropagationConfig,
                  power_p: float, power_q: float) -> _Physics:
    dz = fiber.length / config.n_steps
    ops = dispersion_operators(profile, carriers, mesh, config.n_max) if config.dispersion else {}
    half = {band: np.exp(0.5j * dz * op) for band, op in ops.items()}
    dbeta = float(phase_mismatch(profile, fiber.gamma, power_p, power_q, carriers, 0.0))
    return _Physics(mesh, fiber.gamma, dz, config, half, dbeta)


def _pump_rhs(phys: _Physics, ap, aq):
    g = phys.gamma
    ip, iq = np.abs(ap) ** 2, np.abs(aq) ** 2
    phase_p = np.zeros_like(ip)
    phase_q = np.zeros_like(iq)
    if phys.config.spm:
        phase_p = phase_p + g * ip
        phase_q = phase_q + g * iq
    if phys.config.cpm:
        phase_p = phase_p + 2.0 * g * iq
        phase_q = phase_q + 2.0 * g * ip
    return 1j * phase_p * ap, 1j * phase_q * aq


def _pump_stages(phys: _Physics, ap, aq):
    """RK4 stage pump values and the end-of-step pumps for one nonlinear substep."""
    h = phys.dz
    k1 = _pump_rhs(phys, ap, aq)
    s2 = (ap + 0.5 * h * k1[0], aq + 0.5 * h * k1[1])
    k2 = _pump_rhs(phys, *s2)
    s3 = (ap + 0.5 * h * k2[0], aq + 0.5 * h * k2[1])
    k3 = _pump_rhs(phys, *s3)
    s4 = (ap + h * k3[0], aq + h * k3[1])
    k4 = _pump_rhs(phys, *s4)
    end = (ap + h / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
           aq + h / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]))
    return ((ap, aq), s2, s3, s4), end


def _pump_step(phys: _Physics, ap, aq):
    ap = phys.half_dispersion("p", ap)
    aq = phys.half_dispersion("q", aq)
    stages, (ap, aq) = _pump_stages(phys, ap, aq)
    return stages, (phys.half_dispersion("p", ap), phys.half_dispersion("q", aq))


@dataclass(frozen=True)
class PumpRecord:
    """Checkpointed pump evolution; immutable and shareable between signal runs."""

    fiber: FiberSpec
    mesh: TemporalMesh
    carriers: Carriers
    config: PropagationConfig
    power_p: float
    power_q: float
    checkpoints: np.ndarray = field(repr=False)  # (n_ckpt, 2, n_points)
    energies: np.ndarray = field(repr=False)  # (n_steps + 1, 2) time-integrated |A|^2
    physics: _Physics = field(repr=False)

    @property
    def z_checkpoints(self) -> np.ndarray:
        return np.arange(len(self.checkpoints)) * self.physics.dz * self.config.store_every

    @property
    def z(self) -> np.ndarray:
        return np.arange(self.config.n_steps + 1) * self.physics.dz

    @property
    def output(self) -> tuple[np.ndarray, np.ndarray]:
        return self.checkpoints[-1, 0], self.checkpoints[-1, 1]

    def replay(self):
        """Yield the RK4 stage pumps of every step, bit-identical to the original run."""
        every = self.config.store_every
        for k in range(len(self.checkpoints) - 1):
            ap, aq = self.checkpoints[k]
            for _ in range(every):
                stages, (ap, aq) = _pump_step(self.physics, ap, aq)
                yield stages


def propagate_pumps(fiber: FiberSpec, mesh: TemporalMesh, pump_p: np.ndarray, pump_q: np.ndarray,
                    config: PropagationConfig, carriers: Carriers,
                    profile: DispersionProfile | None = None) -> PumpRecord:
    """Classical pump evolution under dispersion, SPM and mutual CPM."""
    if profile is None:
        profile = DispersionProfile.from_fiber(fiber)
    ap = np.asarray(pump_p, dtype=complex)
    aq = np.asarray(pump_q, dtype=complex)
    for name, a in (("pump p", ap), ("pump q", aq)):
        if a.shape != (mesh.n_points,):
            raise ConfigurationError(f"{name} does not match the mesh")
        check_aliasing(a, mesh, name)
    power_p, power_q = float(np.max(np.abs(ap)) ** 2), float(np.max(np.abs(aq)) ** 2)
    phys = _make_physics(fiber, mesh, carriers, profile, config, power_p, power_q)
    ckpts = [(ap, aq)]
    energies = [(mesh.norm_sq(ap), mesh.norm_sq(aq))]
    for i in range(config.n_steps):
        _, (ap, aq) = _pump_step(phys, ap, aq)
        energies.append((mesh.norm_sq(ap), mesh.norm_sq(aq)))
        if (i + 1) % config.store_every == 0:
            ckpts.append((ap, aq))
    check_aliasing(ap, mesh, "pump p output")
    check_aliasing(aq, mesh, "pump q output")
    cp = np.array(ckpts)
    cp.setflags(write=False)
    return PumpRecord(fiber, mesh, carriers, config, power_p, power_q, cp,
                      np.array(energies), phys)


def _signal_rhs(phys: _Physics, pumps, z, g, b):
    ap, aq = pumps
    dg = np.zeros_like(g)
    db = np.zeros_like(b)
    if phys.config.cpm:
        xpm = (2.0 * phys.gamma * (np.abs(ap) ** 2 + np.abs(aq) ** 2))[:, None]
        dg = dg + 1j * xpm * g
        db = db + 1j * xpm * b
    if phys.config.bs:
        c = (2.0 * phys.gamma * np.conj(ap) * aq * np.exp(-1j * phys.delta_beta * z))[:, None]
        dg = dg + 1j * c * b
        db = db + 1j * np.conj(c) * g
    return dg, db


def _signal_core(record: PumpRecord, g: np.ndarray, b: np.ndarray,
                 observe: Callable | None = None):
    """Propagate photon-flux amplitude batches ``(n_points, m)`` through the record."""
    phys = record.physics
    h = phys.dz
    if observe is not None:
        observe(0, 0.0, g, b)
    for i, stages in enumerate(record.replay()):
        z0 = i * h
        g = phys.half_dispersion("g", g)
        b = phys.half_dispersion("b", b)
        s1, s2, s3, s4 = stages
        k1 = _signal_rhs(phys, s1, z0, g, b)
        k2 = _signal_rhs(phys, s2, z0 + 0.5 * h, g + 0.5 * h * k1[0], b + 0.5 * h * k1[1])
        k3 = _signal_rhs(phys, s3, z0 + 0.5 * h, g + 0.5 * h * k2[0], b + 0.5 * h * k2[1])
        k4 = _signal_rhs(phys, s4, z0 + h, g + h * k3[0], b + h * k3[1])
        g = g + h / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        b = b + h / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        g = phys.half_dispersion("g", g)
        b = phys.half_dispersion("b", b)
        if observe is not None:
            observe(i + 1, (i + 1) * h, g, b)
    return g, b


@dataclass
class SignalResult:
    green: np.ndarray
    blue: np.ndarray
    z: np.ndarray | None = None
    n_green: np.ndarray | None = None  # (n_steps + 1, ...) photon numbers
    n_blue: np.ndarray | None = None


def propagate_signals(record: PumpRecord, green_in: np.ndarray, blue_in: np.ndarray,
                      diagnostics: bool = False, photon_units: bool = False,
                      observe: Callable | None = None) -> SignalResult:
    """Propagate green/blue envelopes (1-D, or 2-D batches with one input per column).

    With ``photon_units`` the arrays are taken as photon-flux amplitudes and
    returned in the same units; ``observe(step, z, g, b)`` then sees those units too.
    """
    mesh = record.mesh
    g = np.asarray(green_in, dtype=complex)
    b = np.asarray(blue_in, dtype=complex)
    if g.shape != b.shape or g.shape[0] != mesh.n_points or g.ndim > 2:
        raise ConfigurationError("signal inputs do not match the pump record mesh")
    single = g.ndim == 1
    if single:
        g, b = g[:, None], b[:, None]
    check_aliasing(g, mesh, "green input")
    check_aliasing(b, mesh, "blue input")
    w = record.carriers.omegas
    sg, sb = (1.0, 1.0) if photon_units else (np.sqrt(hbar * w["g"]), np.sqrt(hbar * w["b"]))

    ng, nb = [], []

    def watch(step, z, gg, bb):
        if diagnostics:
            ng.append(mesh.norm_sq(gg))
            nb.append(mesh.norm_sq(bb))
        if observe is not None:
            observe(step, z, gg, bb)

    go, bo = _signal_core(record, g / sg, b / sb, watch)
    check_aliasing(go, mesh, "green output")
    check_aliasing(bo, mesh, "blue output")
    go, bo = go * sg, bo * sb
    if single:
        go, bo = go[:, 0], bo[:, 0]
    res = SignalResult(go, bo)
    if diagnostics:
        res.z = record.z
        res.n_green = np.array(ng)
        res.n_blue = np.array(nb)
        if single:
            res.n_green, res.n_blue = res.n_green[:, 0], res.n_blue[:, 0]
    return res
