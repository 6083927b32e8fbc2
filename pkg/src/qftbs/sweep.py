"""Signal-width parameter sweeps over a fixed pump evolution."""
from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, QFTBSError
from .green import efficiency_vs_length
from .interference import p11_vs_length
from .mesh import gaussian_pulse
from .ssfm import PumpRecord

log = logging.getLogger(__name__)

QUANTITIES = ("max_efficiency", "min_p11")


@dataclass(frozen=True)
class SweepSpec:
    grid: np.ndarray  # signal intensity FWHM values [s]
    quantity: str = "max_efficiency"

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float)
        if g.ndim != 1 or len(g) < 3:
            raise ConfigurationError("a sweep needs at least three grid points")
        if np.any(np.diff(g) <= 0):
            raise ConfigurationError("sweep grid must be strictly increasing")
        if np.any(g <= 0):
            raise ConfigurationError("signal widths must be positive")
        if self.quantity not in QUANTITIES:
            raise ConfigurationError(f"quantity must be one of {QUANTITIES}")
        object.__setattr__(self, "grid", g)


@dataclass(frozen=True)
class SweepPoint:
    fwhm: float
    value: float
    length: float
    error: str = ""


def _photon(record: PumpRecord, fwhm: float) -> np.ndarray:
    a = gaussian_pulse(fwhm, 1.0, 0.0, record.mesh)
    return a / np.sqrt(record.mesh.norm_sq(a))


def sweep_point(record: PumpRecord, fwhm: float, quantity: str) -> SweepPoint:
    """Extremal value over the fiber length for a centred Gaussian of the given width."""
    try:
        photon = _photon(record, fwhm)
        if quantity == "max_efficiency":
            z, eff = efficiency_vs_length(record, photon)
            k = int(np.argmax(eff))
            return SweepPoint(fwhm, float(eff[k]), float(z[k]))
        trace = p11_vs_length(record, photon, photon)
        value, length = trace.minimum()
        return SweepPoint(fwhm, value, length)
    except QFTBSError as exc:
        log.warning("sweep point %.3e s failed: %s", fwhm, exc)
        return SweepPoint(fwhm, float("nan"), float("nan"), f"{type(exc).__name__}: {exc}")


def _task(args):
    return sweep_point(*args)


def run_sweep(spec: SweepSpec, record: PumpRecord, jobs: int = 1) -> list[SweepPoint]:
    tasks = [(record, float(w), spec.quantity) for w in spec.grid]
    if jobs <= 1:
        return [_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_task, tasks))


def _vertex(x, y, k: int) -> tuple[float, float]:
    """Parabola through points ``k-1, k, k+1``; the grid point itself at the ends."""
    if k == 0 or k == len(x) - 1:
        return float(x[k]), float(y[k])
    a, b, c = np.polyfit(x[k - 1:k + 2], y[k - 1:k + 2], 2)
    if a == 0:
        return float(x[k]), float(y[k])
    xv = float(np.clip(-b / (2 * a), x[k - 1], x[k + 1]))
    return xv, float(np.polyval((a, b, c), xv))


def refine_extremum(x, y, kind: str = "max") -> tuple[float, float]:
    """Location and value of the sampled maximum (or minimum), refined by a parabola."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    ok = np.isfinite(y)
    x, y = x[ok], y[ok]
    if len(x) < 3:
        raise ConfigurationError("need at least three finite sweep values")
    k = int(np.argmax(y) if kind == "max" else np.argmin(y))
    return _vertex(x, y, k)


def knee(x, y) -> float:
    """Abscissa farthest from the chord joining the end points, on normalized axes."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    ok = np.isfinite(y)
    x, y = x[ok], y[ok]
    if len(x) < 3:
        raise ConfigurationError("need at least three finite sweep values")
    u = (x - x[0]) / (x[-1] - x[0])
    span = y.max() - y.min()
    v = (y - y.min()) / (span if span > 0 else 1.0)
    dist = np.abs((v[-1] - v[0]) * u - v + v[0]) / np.hypot(v[-1] - v[0], 1.0)
    return _vertex(x, dist, int(np.argmax(dist)))[0]

