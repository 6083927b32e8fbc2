"""Green matrix of the signal map in a Hermite-Gauss basis and its Schmidt analysis.

Blocks are stored in forward (output-from-input) form and named
``<input band><output band>``: ``gb`` maps green input coefficients to blue
output coefficients.  All amplitudes are photon-flux normalized, so the
stacked matrix is unitary on the subspace the basis resolves.
"""
from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import curve_fit

from .errors import BasisFailureError, ConditioningError, NumericalError
from .mesh import FWHM_PER_SCALE, HGBasis, TemporalMesh, hg_matrix
from .ssfm import PumpRecord, _signal_core, check_aliasing

log = logging.getLogger(__name__)

UNITARITY_TOL = 1e-2
MAX_CONDITION = 1e8


@dataclass(frozen=True)
class GreenMatrix:
    gg: np.ndarray
    gb: np.ndarray
    bg: np.ndarray
    bb: np.ndarray
    basis: HGBasis

    @property
    def n_out(self) -> int:
        return self.gg.shape[0]

    @property
    def valid_dim(self) -> int:
        return self.gg.shape[1]

    def stacked(self) -> np.ndarray:
        """``[[gg, bg], [gb, bb]]``: rows are green then blue outputs."""
        return np.block([[self.gg, self.bg], [self.gb, self.bb]])

    def backward(self) -> np.ndarray:
        return self.stacked().conj().T

    def restrict(self, m: int) -> "GreenMatrix":
        return replace(self, gg=self.gg[:, :m], gb=self.gb[:, :m], bg=self.bg[:, :m], bb=self.bb[:, :m])


def _propagate_columns(args):
    record, g, b = args
    return _signal_core(record, g, b)


def _run_batches(record: PumpRecord, g: np.ndarray, b: np.ndarray, jobs: int):
    if jobs <= 1 or g.shape[1] < 2:
        return _signal_core(record, g, b)
    chunks = np.array_split(np.arange(g.shape[1]), jobs)
    tasks = [(record, g[:, c], b[:, c]) for c in chunks if len(c)]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        results = list(pool.map(_propagate_columns, tasks))
    return np.hstack([r[0] for r in results]), np.hstack([r[1] for r in results])


def compute_green(record: PumpRecord, basis: HGBasis, n_modes: int | None = None,
                  jobs: int = 1) -> GreenMatrix:
    """Propagate every basis function in each band and project the outputs."""
    mesh = record.mesh
    n = basis.n_modes if n_modes is None else n_modes
    basis = replace(basis, n_modes=n)
    psi = hg_matrix(basis, mesh)
    a_in = mesh.dt * (psi.T @ psi)
    cond = np.linalg.cond(a_in)
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise ConditioningError(f"input matrix condition number {cond:.3e}")
    zeros = np.zeros_like(psi, dtype=complex)
    g_in = np.hstack([psi.astype(complex), zeros])
    b_in = np.hstack([zeros, psi.astype(complex)])
    check_aliasing(g_in[:, :n], mesh, "HG inputs")
    g_out, b_out = _run_batches(record, g_in, b_in, jobs)
    proj_g = mesh.dt * (psi.T @ g_out)
    proj_b = mesh.dt * (psi.T @ b_out)
    a_inv = np.linalg.inv(a_in)
    blocks = [blk @ a_inv for blk in (proj_g[:, :n], proj_b[:, :n], proj_g[:, n:], proj_b[:, n:])]
    return GreenMatrix(*blocks, basis=basis)


def unitarity_residual(green: GreenMatrix) -> tuple[float, float]:
    """Largest off-diagonal magnitude and diagonal deviation of ``S^H S``."""
    s = green.stacked()
    gram = s.conj().T @ s
    diag = np.abs(np.diag(gram) - 1.0)
    off = np.abs(gram - np.diag(np.diag(gram)))
    return float(off.max()), float(diag.max())


def valid_submatrix(green: GreenMatrix, tolerance: float = UNITARITY_TOL) -> GreenMatrix:
    """Restrict to the largest leading set of input modes that passes the unitarity test."""
    for m in range(green.valid_dim, 0, -1):
        sub = green.restrict(m)
        if max(unitarity_residual(sub)) < tolerance:
            return sub
    raise BasisFailureError("no input mode satisfies the unitarity condition")


@dataclass(frozen=True)
class SchmidtDecomposition:
    """Columns of ``V``/``W`` are input modes, ``upsilon``/``w`` output modes (HG coefficients).

    ``gb @ V = -w * rho``, ``gg @ V = upsilon * tau``,
    ``bg @ W = upsilon * rho``, ``bb @ W = w * tau``.
    """

    rho: np.ndarray
    tau: np.ndarray
    V: np.ndarray
    upsilon: np.ndarray
    W: np.ndarray
    w: np.ndarray
    basis: HGBasis

    @property
    def n_modes(self) -> int:
        return len(self.rho)


def _phase_of_largest(vecs: np.ndarray) -> np.ndarray:
    idx = np.argmax(np.abs(vecs), axis=0)
    ph = vecs[idx, np.arange(vecs.shape[1])]
    return np.where(np.abs(ph) > 0, ph / np.where(np.abs(ph) > 0, np.abs(ph), 1.0), 1.0)


def _unit_columns(m: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(m, axis=0)
    return m / np.where(norms > 0, norms, 1.0)


def schmidt_decompose(green: GreenMatrix) -> SchmidtDecomposition:
    try:
        u, rho, vh = np.linalg.svd(green.gb, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError("SVD of the translation block did not converge") from exc
    # make the largest component of every input mode real and positive
    ph = _phase_of_largest(vh.conj().T)
    v = vh.conj().T / ph
    w = -u / ph
    gv = green.gg @ v
    tau = np.linalg.norm(gv, axis=0)
    upsilon = _unit_columns(gv)
    # W from whichever block carries more weight for that mode
    from_bb = green.bb.conj().T @ w
    from_bg = green.bg.conj().T @ upsilon
    W = np.where(tau >= rho, from_bb, from_bg)
    W = _unit_columns(W)
    return SchmidtDecomposition(rho, tau, v, upsilon, W, w, green.basis)


def mode_on_mesh(coeffs: np.ndarray, basis: HGBasis, mesh: TemporalMesh) -> np.ndarray:
    psi = hg_matrix(basis, mesh, len(coeffs))
    return psi @ coeffs


def _gauss(t, a, t0, s):
    return a * np.exp(-0.5 * ((t - t0) / s) ** 2)


def fit_gaussian_width(t: np.ndarray, amplitude: np.ndarray) -> tuple[float, float, float]:
    """Fit ``|A(t)|`` to a Gaussian; returns ``(scale, center, r_squared)``."""
    y = np.abs(amplitude)
    wgt = y ** 2
    mean = np.sum(t * wgt) / np.sum(wgt)
    s0 = np.sqrt(2.0 * np.sum((t - mean) ** 2 * wgt) / np.sum(wgt))
    try:
        popt, _ = curve_fit(_gauss, t, y, p0=(y.max(), mean, s0), maxfev=10000)
    except RuntimeError as exc:
        raise NumericalError("Gaussian fit of the first Schmidt mode failed") from exc
    resid = y - _gauss(t, *popt)
    r2 = 1.0 - np.sum(resid ** 2) / np.sum((y - y.mean()) ** 2)
    return abs(float(popt[2])), float(popt[1]), float(r2)


@dataclass
class TimescaleResult:
    t_char: float
    converged: bool
    history: list = field(default_factory=list)
    r_squared: float = float("nan")
    green: GreenMatrix | None = None
    schmidt: SchmidtDecomposition | None = None
    basis_t_char: float = float("nan")  # width of the basis behind ``green``


def optimal_timescale(record: PumpRecord, t_char0: float = 40e-12, n_modes: int = 25,
                      center: float = 0.0, tol: float = 0.05, max_iter: int = 5,
                      unitarity_tol: float = UNITARITY_TOL, min_r_squared: float = 0.8,
                      jobs: int = 1) -> TimescaleResult:
    """Refit the basis width to the first input Schmidt mode until it stops moving."""
    mesh = record.mesh
    t_char = t_char0
    history = []
    result = TimescaleResult(t_char, False, history)
    for _ in range(max_iter):
        basis = HGBasis(t_char, center, n_modes)
        green = valid_submatrix(compute_green(record, basis, jobs=jobs), unitarity_tol)
        schmidt = schmidt_decompose(green)
        first = mode_on_mesh(schmidt.V[:, 0], basis, mesh)
        scale, _, r2 = fit_gaussian_width(mesh.t, first)
        new = FWHM_PER_SCALE * scale
        history.append((t_char, new, r2))
        result = TimescaleResult(new, False, history, r2, green, schmidt, t_char)
        if r2 < min_r_squared:
            log.warning("first Schmidt mode is not Gaussian-like (R^2=%.3f)", r2)
            raise NumericalError(f"timescale fit failed: R^2={r2:.3f}, history={history}")
        if abs(new - t_char) / t_char < tol:
            result.converged = True
            return result
        t_char = new
    return result


def efficiency_vs_length(record: PumpRecord, green_input: np.ndarray, z_grid=None):
    """Blue photon number along the fiber over the launched green photon number.

    ``green_input`` holds one photon-flux envelope per column (or a single 1-D envelope).
    Returns ``(z, efficiency)``; with ``z_grid`` the curve is linearly interpolated.
    """
    mesh = record.mesh
    g = np.asarray(green_input, dtype=complex)
    single = g.ndim == 1
    if single:
        g = g[:, None]
    n0 = mesh.norm_sq(g)
    nb = []

    def watch(step, z, gg, bb):
        nb.append(mesh.norm_sq(bb))

    _signal_core(record, g, np.zeros_like(g), watch)
    eff = np.array(nb) / n0
    z = record.z
    if z_grid is not None:
        zg = np.asarray(z_grid, dtype=float)
        eff = np.column_stack([np.interp(zg, z, eff[:, k]) for k in range(eff.shape[1])])
        z = zg
    return z, (eff[:, 0] if single else eff)
