"""Turn a validated :class:`CaseConfig` into physical objects and a cached pump run."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .analytic import AnalyticParams, relative_slowness
from .config import AUTO, CaseConfig
from .errors import ConfigurationError
from .fiber import Carriers, DispersionProfile, FiberSpec, phase_matched_carriers
from .mesh import HGBasis, TemporalMesh, gaussian_pulse, make_mesh
from .ssfm import PropagationConfig, PumpRecord, propagate_pumps

log = logging.getLogger(__name__)

PS = 1e-12
NM = 1e-9
WINDOW_FACTOR = 8.0
LONG_PUMP_THRESHOLD = 500 * PS
SWEEP_DEFAULTS = {"long": (10.0, 250.0), "short": (10.0, 120.0)}


def _checkpoint_stride(n_steps: int, target: int = 10) -> int:
    return max(k for k in range(1, min(target, n_steps) + 1) if n_steps % k == 0)


@dataclass
class Case:
    config: CaseConfig
    fiber: FiberSpec = field(init=False)
    profile: DispersionProfile = field(init=False)
    carriers: Carriers = field(init=False)

    def __post_init__(self):
        cfg = self.config
        f = cfg.fiber
        self.fiber = FiberSpec(f.fill_fraction, f.core_radius_um * 1e-6, f.gamma_per_W_m, f.length_m)
        self.profile = DispersionProfile.from_fiber(self.fiber)
        self.carriers = self._carriers()

    def _carriers(self) -> Carriers:
        cfg = self.config
        lp, lq = cfg.pump_p.wavelength_nm * NM, cfg.pump_q.wavelength_nm * NM
        lg = cfg.signals.green_nm * NM
        if cfg.signals.phase_match:
            if cfg.signals.blue_nm != AUTO:
                raise ConfigurationError("signals.blue_nm must be 'auto' when phase_match is on")
            return phase_matched_carriers(self.profile, self.fiber.gamma, self.power_p, self.power_q,
                                          lp, lq, lg)
        lb = None if cfg.signals.blue_nm == AUTO else cfg.signals.blue_nm * NM
        return Carriers.from_wavelengths(lp, lq, lg, lb)

    @property
    def power_p(self) -> float:
        return self.config.pump_p.peak_power_W

    @property
    def power_q(self) -> float:
        return self.config.pump_q.peak_power_W

    @property
    def pump_fwhm(self) -> float:
        return max(self.config.pump_p.fwhm_ps, self.config.pump_q.fwhm_ps) * PS

    @property
    def is_long(self) -> bool:
        return self.pump_fwhm >= LONG_PUMP_THRESHOLD

    @cached_property
    def analytic(self) -> AnalyticParams:
        b1, b2 = relative_slowness(self.profile, self.carriers)
        power = np.sqrt(self.power_p * self.power_q)
        return AnalyticParams.from_pumps(self.pump_fwhm, power, self.fiber.gamma, b1, self.fiber.length)

    @property
    def fixed_t_char(self) -> float | None:
        t = self.config.basis.t_char_ps
        return None if t == AUTO else t * PS

    @property
    def sweep_range(self) -> tuple[float, float]:
        lo, hi = SWEEP_DEFAULTS["long" if self.is_long else "short"]
        s = self.config.sweep
        lo = lo if s.fwhm_start_ps == AUTO else s.fwhm_start_ps
        hi = hi if s.fwhm_stop_ps == AUTO else s.fwhm_stop_ps
        return lo * PS, hi * PS

    def sweep_grid(self) -> np.ndarray:
        lo, hi = self.sweep_range
        return np.linspace(lo, hi, self.config.sweep.points)

    @cached_property
    def mesh(self) -> TemporalMesh:
        m = self.config.mesh
        if m.window_ps != AUTO:
            return make_mesh(m.n_points, m.window_ps * PS)
        t_ref = self.fixed_t_char or self.analytic.mode_fwhm
        span = max(self.pump_fwhm, 4.0 * t_ref)
        if self.config.experiment == "sweep":
            span = max(span, self.sweep_range[1])
        return make_mesh(m.n_points, WINDOW_FACTOR * span)

    def pumps(self) -> tuple[np.ndarray, np.ndarray]:
        p, q = self.config.pump_p, self.config.pump_q
        return (gaussian_pulse(p.fwhm_ps * PS, p.peak_power_W, p.delay_ps * PS, self.mesh),
                gaussian_pulse(q.fwhm_ps * PS, q.peak_power_W, q.delay_ps * PS, self.mesh))

    @property
    def propagation(self) -> PropagationConfig:
        s = self.config.solver
        return PropagationConfig(s.n_steps, _checkpoint_stride(s.n_steps), s.dispersion, s.spm,
                                 s.cpm, s.bs, s.dispersion_order)

    @cached_property
    def record(self) -> PumpRecord:
        ap, aq = self.pumps()
        log.info("propagating pumps over %d steps", self.config.solver.n_steps)
        return propagate_pumps(self.fiber, self.mesh, ap, aq, self.propagation, self.carriers,
                               self.profile)

    def basis(self, t_char: float) -> HGBasis:
        b = self.config.basis
        return HGBasis(t_char, b.center_ps * PS, b.n_modes)

    def signal_fwhm(self, t_char: float) -> float:
        s = self.config.signals.fwhm_ps
        return t_char if s == AUTO else s * PS

    def signal_photon(self, fwhm: float, delay: float = 0.0) -> np.ndarray:
        """Unit-photon-number Gaussian envelope (photon-flux units) of the given intensity FWHM."""
        a = gaussian_pulse(fwhm, 1.0, delay, self.mesh)
        return a / np.sqrt(self.mesh.norm_sq(a))


def build_case(config: CaseConfig) -> Case:
    return Case(config)
