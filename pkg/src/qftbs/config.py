"""YAML case configuration with a closed schema.

Every section and key is a dataclass field below; anything else is rejected so a
misspelt physics parameter cannot be silently ignored.  Quantities carry their
unit in the key name (``fwhm_ps``, ``wavelength_nm``, ...).
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import yaml

from .errors import ConfigurationError

EXPERIMENTS = ("dispersion", "phasematch", "propagate", "green", "schmidt", "hom", "analytic", "sweep")
AUTO = "auto"


@dataclass(frozen=True)
class FiberConfig:
    fill_fraction: float = 0.494
    core_radius_um: float = 0.72
    gamma_per_W_m: float = 0.1
    length_m: float = 20.0


@dataclass(frozen=True)
class PumpConfig:
    wavelength_nm: float
    fwhm_ps: float = 1000.0
    peak_power_W: float = 0.4
    delay_ps: float = 0.0


@dataclass(frozen=True)
class SignalConfig:
    green_nm: float = 673.0
    blue_nm: float | str = AUTO
    phase_match: bool = True
    fwhm_ps: float | str = AUTO  # Gaussian test pulses; "auto" uses the basis width


@dataclass(frozen=True)
class MeshConfig:
    n_points: int = 4096
    window_ps: float | str = AUTO


@dataclass(frozen=True)
class BasisConfig:
    n_modes: int = 25
    t_char_ps: float | str = AUTO
    t_char_start_ps: float = 40.0
    center_ps: float = 0.0


@dataclass(frozen=True)
class SolverConfig:
    n_steps: int = 400
    dispersion: bool = True
    spm: bool = True
    cpm: bool = True
    bs: bool = True
    dispersion_order: int = 4


@dataclass(frozen=True)
class SweepConfig:
    quantity: str = "max_efficiency"
    fwhm_start_ps: float | str = AUTO
    fwhm_stop_ps: float | str = AUTO
    points: int = 25


@dataclass(frozen=True)
class PhaseMatchConfig:
    span_Trad_s: float = 1.5
    points: int = 1201


@dataclass(frozen=True)
class ToleranceConfig:
    unitarity: float = 1e-2
    timescale_rel: float = 0.05
    timescale_iterations: int = 5
    fit_r_squared: float = 0.8


@dataclass(frozen=True)
class CaseConfig:
    experiment: str
    name: str = "case"
    fiber: FiberConfig = field(default_factory=FiberConfig)
    pump_p: PumpConfig = field(default_factory=lambda: PumpConfig(808.0))
    pump_q: PumpConfig = field(default_factory=lambda: PumpConfig(845.0))
    signals: SignalConfig = field(default_factory=SignalConfig)
    mesh: MeshConfig = field(default_factory=MeshConfig)
    basis: BasisConfig = field(default_factory=BasisConfig)
    solver: SolverConfig = field(default_factory=SolverConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    phasematch: PhaseMatchConfig = field(default_factory=PhaseMatchConfig)
    tolerances: ToleranceConfig = field(default_factory=ToleranceConfig)

    def to_dict(self) -> dict:
        """Nested mapping in the file schema; ``config_from_dict(cfg.to_dict()) == cfg``."""
        d = asdict(self)
        d["pumps"] = {"p": d.pop("pump_p"), "q": d.pop("pump_q")}
        return d


_SECTIONS = {
    "fiber": FiberConfig,
    "signals": SignalConfig,
    "mesh": MeshConfig,
    "basis": BasisConfig,
    "solver": SolverConfig,
    "sweep": SweepConfig,
    "phasematch": PhaseMatchConfig,
    "tolerances": ToleranceConfig,
}
_AUTO_OK = {("signals", "blue_nm"), ("signals", "fwhm_ps"), ("mesh", "window_ps"),
            ("basis", "t_char_ps"), ("sweep", "fwhm_start_ps"), ("sweep", "fwhm_stop_ps")}


def _coerce(section: str, key: str, value, default):
    where = f"{section}.{key}"
    if isinstance(value, str) and value.strip().lower() == AUTO:
        if (section, key) in _AUTO_OK:
            return AUTO
        raise ConfigurationError(f"{where} does not accept 'auto'")
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ConfigurationError(f"{where} must be true or false")
        return value
    if isinstance(default, int) and not isinstance(default, bool):
        try:
            out = int(value)
        except (TypeError, ValueError):
            raise ConfigurationError(f"{where} must be an integer, got {value!r}") from None
        if out != float(value):
            raise ConfigurationError(f"{where} must be an integer, got {value!r}")
        return out
    if isinstance(default, str) and default != AUTO:
        if not isinstance(value, str):
            raise ConfigurationError(f"{where} must be a string")
        return value
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ConfigurationError(f"{where} must be a number, got {value!r}") from None


def _build(cls, section: str, raw, base):
    if raw is None:
        return base
    if not isinstance(raw, dict):
        raise ConfigurationError(f"section {section!r} must be a mapping")
    known = asdict(base)
    unknown = set(raw) - set(known)
    if unknown:
        raise ConfigurationError(f"unknown keys in {section!r}: {sorted(unknown)}")
    values = dict(known)
    for key, value in raw.items():
        values[key] = _coerce(section, key, value, known[key])
    return cls(**values)


def _check(cfg: CaseConfig) -> None:
    def positive(name, value):
        if value != AUTO and not value > 0:
            raise ConfigurationError(f"{name} must be positive, got {value!r}")

    f = cfg.fiber
    if not 0 <= f.fill_fraction < 1:
        raise ConfigurationError("fiber.fill_fraction must lie in [0, 1)")
    positive("fiber.core_radius_um", f.core_radius_um)
    positive("fiber.length_m", f.length_m)
    if f.gamma_per_W_m < 0:
        raise ConfigurationError("fiber.gamma_per_W_m must be non-negative")
    for label, pump in (("pumps.p", cfg.pump_p), ("pumps.q", cfg.pump_q)):
        positive(f"{label}.wavelength_nm", pump.wavelength_nm)
        positive(f"{label}.fwhm_ps", pump.fwhm_ps)
        if pump.peak_power_W < 0:
            raise ConfigurationError(f"{label}.peak_power_W must be non-negative")
    positive("signals.green_nm", cfg.signals.green_nm)
    positive("signals.blue_nm", cfg.signals.blue_nm)
    positive("signals.fwhm_ps", cfg.signals.fwhm_ps)
    positive("mesh.window_ps", cfg.mesh.window_ps)
    positive("basis.t_char_ps", cfg.basis.t_char_ps)
    positive("basis.t_char_start_ps", cfg.basis.t_char_start_ps)
    if cfg.basis.n_modes < 1:
        raise ConfigurationError("basis.n_modes must be >= 1")
    if cfg.solver.n_steps < 1:
        raise ConfigurationError("solver.n_steps must be >= 1")
    if not 1 <= cfg.solver.dispersion_order <= 4:
        raise ConfigurationError("solver.dispersion_order must be between 1 and 4")
    if cfg.sweep.quantity not in ("max_efficiency", "min_p11"):
        raise ConfigurationError("sweep.quantity must be 'max_efficiency' or 'min_p11'")
    if cfg.sweep.points < 3:
        raise ConfigurationError("sweep.points must be >= 3")
    positive("sweep.fwhm_start_ps", cfg.sweep.fwhm_start_ps)
    positive("sweep.fwhm_stop_ps", cfg.sweep.fwhm_stop_ps)
    if cfg.phasematch.points < 3:
        raise ConfigurationError("phasematch.points must be >= 3")
    positive("phasematch.span_Trad_s", cfg.phasematch.span_Trad_s)


def config_from_dict(raw: dict, overrides: dict | None = None) -> CaseConfig:
    if not isinstance(raw, dict):
        raise ConfigurationError("configuration must be a mapping at the top level")
    allowed = {"experiment", "name", "pumps", *_SECTIONS}
    unknown = set(raw) - allowed
    if unknown:
        raise ConfigurationError(f"unknown top-level keys: {sorted(unknown)}")
    experiment = raw.get("experiment")
    if experiment not in EXPERIMENTS:
        raise ConfigurationError(f"experiment must be one of {EXPERIMENTS}, got {experiment!r}")
    base = CaseConfig(experiment=experiment, name=str(raw.get("name", "case")))
    kwargs = {}
    for section, cls in _SECTIONS.items():
        kwargs[section] = _build(cls, section, raw.get(section), getattr(base, section))
    pumps = raw.get("pumps")
    if not isinstance(pumps, dict) or set(pumps) != {"p", "q"}:
        raise ConfigurationError("pumps must be a mapping with keys 'p' and 'q'")
    kwargs["pump_p"] = _build(PumpConfig, "pumps.p", pumps.get("p"), base.pump_p)
    kwargs["pump_q"] = _build(PumpConfig, "pumps.q", pumps.get("q"), base.pump_q)
    cfg = CaseConfig(experiment=experiment, name=base.name, **kwargs)
    if overrides:
        cfg = apply_overrides(cfg, **overrides)
    _check(cfg)
    return cfg


def apply_overrides(cfg: CaseConfig, n_steps: int | None = None, n_modes: int | None = None,
                    n_points: int | None = None) -> CaseConfig:
    if n_steps is not None:
        cfg = replace(cfg, solver=replace(cfg.solver, n_steps=int(n_steps)))
    if n_modes is not None:
        cfg = replace(cfg, basis=replace(cfg.basis, n_modes=int(n_modes)))
    if n_points is not None:
        cfg = replace(cfg, mesh=replace(cfg.mesh, n_points=int(n_points)))
    _check(cfg)
    return cfg


def load_config(path, **overrides) -> CaseConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigurationError(f"{path}: invalid YAML: {exc}") from exc
    return config_from_dict(raw, {k: v for k, v in overrides.items() if v is not None})
