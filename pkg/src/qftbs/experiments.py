"""The eight experiments behind the command line.

Each runner takes a :class:`~qftbs.cases.Case` and returns a :class:`RunResult`
holding tables, JSON documents and scalar summaries; nothing here touches the
filesystem.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .analytic import analytic_modes, analytic_modes_time, mehler_decomposition, overlap_with_numeric
from .cases import PS, Case
from .fiber import (dispersion_D, group_velocity, phase_matching_curve, phase_mismatch,
                    zero_dispersion_wavelength)
from .green import (GreenMatrix, SchmidtDecomposition, compute_green, efficiency_vs_length,
                    mode_on_mesh, optimal_timescale, schmidt_decompose, unitarity_residual,
                    valid_submatrix)
from .interference import hom_singular_values, p11_vs_length
from .io import Table
from .ssfm import propagate_signals
from .sweep import SweepSpec, knee, refine_extremum, run_sweep

log = logging.getLogger(__name__)

N_REPORTED_MODES = 3


@dataclass
class RunResult:
    experiment: str
    tables: dict = field(default_factory=dict)
    documents: dict = field(default_factory=dict)
    summary: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)


def run_dispersion(case: Case, jobs: int = 1) -> RunResult:
    wl = np.linspace(600e-9, 1600e-9, 201)
    d = dispersion_D(case.profile, wl)
    vg = np.array([group_velocity(case.profile, x) for x in wl])
    res = RunResult("dispersion")
    res.tables["dispersion"] = Table.from_columns(wavelength_nm=wl * 1e9, D_ps_nm_km=d, vg_m_s=vg)
    zdw = zero_dispersion_wavelength(case.profile, 600e-9, 1000e-9)
    res.summary["zdw_nm"] = zdw * 1e9
    for band in "pqgb":
        lam = case.carriers.wavelength(band)
        res.summary[f"carrier_{band}_nm"] = lam * 1e9
        res.summary[f"vg_{band}_m_s"] = group_velocity(case.profile, lam)
    return res


def run_phasematch(case: Case, jobs: int = 1) -> RunResult:
    pm = case.config.phasematch
    det = np.linspace(-pm.span_Trad_s, pm.span_Trad_s, pm.points) * 1e12
    curve = phase_matching_curve(case.profile, case.fiber, case.power_p, case.power_q,
                                 case.carriers, det)
    res = RunResult("phasematch")
    res.tables["phasematch"] = Table.from_columns(detuning_Trad_s=det * 1e-12, sinc=curve.values)
    dbeta = float(phase_mismatch(case.profile, case.fiber.gamma, case.power_p, case.power_q,
                                 case.carriers, 0.0))
    res.tables["phasematch_summary"] = Table.from_columns(
        fwhm_Trad_s=[curve.fwhm * 1e-12], delta_beta_rad_m=[dbeta])
    res.summary["fwhm_Trad_s"] = curve.fwhm * 1e-12
    res.summary["delta_beta_rad_m"] = dbeta
    return res


def _t_char(case: Case, jobs: int):
    """Fixed basis width from the config, or the self-consistent optimum."""
    fixed = case.fixed_t_char
    if fixed is not None:
        return fixed, None
    tol = case.config.tolerances
    result = optimal_timescale(case.record, case.config.basis.t_char_start_ps * PS,
                               case.config.basis.n_modes, case.config.basis.center_ps * PS,
                               tol.timescale_rel, tol.timescale_iterations, tol.unitarity,
                               tol.fit_r_squared, jobs)
    if not result.converged:
        log.warning("basis width did not converge: %s", result.history)
    return result.t_char, result


def _green_and_schmidt(case: Case, jobs: int) -> tuple[GreenMatrix, SchmidtDecomposition, dict]:
    t_char, fit = _t_char(case, jobs)
    info = {"t_char_ps": t_char / PS}
    if fit is not None:
        info["t_char_converged"] = fit.converged
        info["t_char_fit_r_squared"] = fit.r_squared
        info["t_char_iterations"] = len(fit.history)
    full = compute_green(case.record, case.basis(t_char), jobs=jobs)
    off, diag = unitarity_residual(full)
    info["unitarity_full_offdiag"] = off
    info["unitarity_full_diag"] = diag
    green = valid_submatrix(full, case.config.tolerances.unitarity)
    off, diag = unitarity_residual(green)
    info["valid_dim"] = green.valid_dim
    info["unitarity_valid_offdiag"] = off
    info["unitarity_valid_diag"] = diag
    return green, schmidt_decompose(green), info


def run_propagate(case: Case, jobs: int = 1) -> RunResult:
    mesh = case.mesh
    t_ref = case.fixed_t_char or case.analytic.mode_fwhm
    fwhm = case.signal_fwhm(t_ref)
    photon = case.signal_photon(fwhm)
    sig = propagate_signals(case.record, photon, np.zeros_like(photon), diagnostics=True,
                            photon_units=True)
    total = sig.n_green + sig.n_blue
    res = RunResult("propagate")
    e = case.record.energies
    res.tables["propagate_z"] = Table.from_columns(
        z_m=case.record.z, n_green=sig.n_green, n_blue=sig.n_blue,
        efficiency=sig.n_blue / sig.n_green[0], pump_p_energy_J=e[:, 0], pump_q_energy_J=e[:, 1],
        manley_rowe_rel_error=total / total[0] - 1.0)
    ap, aq = case.record.output
    res.tables["fields_out"] = Table.from_columns(
        t_ps=mesh.t / PS, green_photon_flux=np.abs(sig.green) ** 2,
        blue_photon_flux=np.abs(sig.blue) ** 2, pump_p_W=np.abs(ap) ** 2, pump_q_W=np.abs(aq) ** 2)
    res.summary.update(signal_fwhm_ps=fwhm / PS, efficiency=float(sig.n_blue[-1] / sig.n_green[0]),
                       manley_rowe_max_rel_error=float(np.max(np.abs(total / total[0] - 1.0))),
                       pump_energy_max_rel_error=float(np.max(np.abs(e / e[0] - 1.0))))
    return res


def run_green(case: Case, jobs: int = 1) -> RunResult:
    res = RunResult("green")
    if case.power_p == 0 or case.power_q == 0:
        res.warnings.append("a pump has zero power: the Green matrix is a pure dispersion map")
    green, _, info = _green_and_schmidt(case, jobs)
    res.summary.update(info)
    res.documents["green_matrix"] = {
        "convention": "blocks named <input band><output band>, rows index output HG modes",
        "t_char_s": green.basis.t_char, "center_s": green.basis.center,
        "n_out": green.n_out, "valid_dim": green.valid_dim,
        "gg": green.gg, "gb": green.gb, "bg": green.bg, "bb": green.bb,
    }
    return res


def _schmidt_tables(res: RunResult, case: Case, green: GreenMatrix, schmidt: SchmidtDecomposition):
    sigma = hom_singular_values(schmidt)
    idx = np.arange(1, schmidt.n_modes + 1)
    res.tables["singular_values"] = Table.from_columns(
        schmidt_index=idx, rho_sq=schmidt.rho ** 2, tau_sq=schmidt.tau ** 2, sigma_hom=sigma)
    for name, family in (("schmidt_V", schmidt.V), ("schmidt_w", schmidt.w)):
        rows = [[k + 1, j, abs(family[j, k])] for k in range(family.shape[1])
                for j in range(family.shape[0])]
        res.tables[name] = Table(["schmidt_index", "hg_index", "abs_coeff"], rows)
    mesh = case.mesh
    modes = {}
    for k in range(min(N_REPORTED_MODES, schmidt.n_modes)):
        modes[f"V{k + 1}_abs"] = np.abs(mode_on_mesh(schmidt.V[:, k], green.basis, mesh))
        modes[f"W{k + 1}_abs"] = np.abs(mode_on_mesh(schmidt.W[:, k], green.basis, mesh))
    res.tables["schmidt_modes_time"] = Table.from_columns(t_ps=mesh.t / PS, **modes)


def run_schmidt(case: Case, jobs: int = 1) -> RunResult:
    res = RunResult("schmidt")
    green, schmidt, info = _green_and_schmidt(case, jobs)
    res.summary.update(info)
    _schmidt_tables(res, case, green, schmidt)
    n = min(N_REPORTED_MODES, schmidt.n_modes)
    inputs = np.column_stack([mode_on_mesh(schmidt.V[:, k], green.basis, case.mesh) for k in range(n)])
    z, eff = efficiency_vs_length(case.record, inputs)
    res.tables["efficiency_vs_z"] = Table.from_columns(
        z_m=z, **{f"efficiency_mode{k + 1}": eff[:, k] for k in range(n)})
    res.summary["rho_sq_leading"] = float(schmidt.rho[0] ** 2)
    res.summary["tau_rho_max_deviation"] = float(np.max(np.abs(schmidt.tau ** 2 + schmidt.rho ** 2 - 1)))
    return res


def run_hom(case: Case, jobs: int = 1) -> RunResult:
    res = RunResult("hom")
    green, schmidt, info = _green_and_schmidt(case, jobs)
    res.summary.update(info)
    sigma = hom_singular_values(schmidt)
    res.tables["hom_sigma"] = Table.from_columns(
        schmidt_index=np.arange(1, schmidt.n_modes + 1), sigma_hom=sigma,
        predicted_min_p11=1.0 - sigma ** 2, p11_end=(schmidt.tau ** 2 - schmidt.rho ** 2) ** 2)
    cols = {}
    for k in range(min(N_REPORTED_MODES, schmidt.n_modes)):
        v = mode_on_mesh(schmidt.V[:, k], green.basis, case.mesh)
        w = mode_on_mesh(schmidt.W[:, k], green.basis, case.mesh)
        trace = p11_vs_length(case.record, v, w)
        cols[f"p11_mode{k + 1}"] = trace.p11
        cols[f"total_mode{k + 1}"] = trace.total
        p, zmin = trace.minimum()
        res.summary[f"min_p11_mode{k + 1}"] = p
        res.summary[f"min_p11_length_mode{k + 1}_m"] = zmin
    res.tables["p11_vs_z"] = Table.from_columns(z_m=case.record.z, **cols)
    return res


def run_analytic(case: Case, jobs: int = 1) -> RunResult:
    res = RunResult("analytic")
    params = case.analytic
    dec = mehler_decomposition(params, case.config.basis.n_modes)
    lam = dec.lambdas
    res.tables["analytic_lambda"] = Table.from_columns(
        mode_index=np.arange(len(lam)), lambda_n=lam)
    mesh = case.mesh
    omega = np.fft.fftshift(mesh.omega)
    time_cols, freq_cols = {}, {}
    for n in range(N_REPORTED_MODES):
        tm = analytic_modes_time(params, n, mesh.t)
        fm = analytic_modes(params, n, omega)
        time_cols[f"V{n}"] = tm["V"].real
        time_cols[f"W{n}"] = tm["W"].real
        freq_cols[f"phi{n}"] = np.abs(fm["V"])
        freq_cols[f"V{n}_phase"] = np.angle(fm["V"])
        freq_cols[f"W{n}_phase"] = np.angle(fm["W"])
    res.tables["analytic_modes_time"] = Table.from_columns(t_ps=mesh.t / PS, **time_cols)
    res.tables["analytic_modes_freq"] = Table.from_columns(omega_Trad_s=omega * 1e-12, **freq_cols)
    res.summary.update(sigma_ps=params.sigma / PS, beta1_s_m=params.beta1, walkoff_ps=params.walkoff / PS,
                       mehler_mu=params.mu, t0_ps=params.t0 / PS, mode_fwhm_ps=params.mode_fwhm / PS,
                       gamma_p0_L=params.gamma_p0_L)
    green, schmidt, info = _green_and_schmidt(case, jobs)
    res.summary.update(info)
    fid = []
    for n in range(min(N_REPORTED_MODES, schmidt.n_modes)):
        num = mode_on_mesh(schmidt.V[:, n], green.basis, mesh)
        fid.append(overlap_with_numeric(analytic_modes_time(params, n, mesh.t)["V"], num))
        res.summary[f"fidelity_mode{n}"] = fid[-1]
    k = min(N_REPORTED_MODES, schmidt.n_modes) - 1
    ratios = schmidt.rho[1:k + 1] / schmidt.rho[:k]
    res.tables["analytic_vs_numeric"] = Table.from_columns(
        mode_index=np.arange(len(fid)), fidelity=fid,
        lambda_scaled=lam[: len(fid)] / lam[0], rho_scaled=schmidt.rho[: len(fid)] / schmidt.rho[0])
    res.summary["rho_ratio_mean"] = float(np.mean(ratios)) if len(ratios) else float("nan")
    return res


def run_sweep_experiment(case: Case, jobs: int = 1) -> RunResult:
    res = RunResult("sweep")
    spec = SweepSpec(case.sweep_grid(), case.config.sweep.quantity)
    points = run_sweep(spec, case.record, jobs)
    res.tables["sweep"] = Table(
        ["signal_fwhm_ps", spec.quantity, "length_m", "error"],
        [[p.fwhm / PS, p.value, p.length, p.error or "-"] for p in points])
    failed = [p for p in points if p.error]
    if failed:
        res.warnings.append(f"{len(failed)} sweep points failed")
    res.summary["failed_points"] = len(failed)
    values = np.array([p.value for p in points])
    if np.sum(np.isfinite(values)) >= 3:
        kind = "max" if spec.quantity == "max_efficiency" else "min"
        pos, val = refine_extremum(spec.grid, values, kind)
        res.summary[f"{kind}_fwhm_ps"] = pos / PS
        res.summary[f"{kind}_value"] = val
        res.summary["knee_fwhm_ps"] = knee(spec.grid, values) / PS
    return res


RUNNERS = {
    "dispersion": run_dispersion,
    "phasematch": run_phasematch,
    "propagate": run_propagate,
    "green": run_green,
    "schmidt": run_schmidt,
    "hom": run_hom,
    "analytic": run_analytic,
    "sweep": run_sweep_experiment,
}


def run_experiment(case: Case, jobs: int = 1) -> RunResult:
    return RUNNERS[case.config.experiment](case, jobs)
