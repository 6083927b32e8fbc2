import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.constants import hbar

from qftbs.errors import ConfigurationError, ResolutionError
from qftbs.fiber import FiberSpec
from qftbs.mesh import gaussian_pulse, make_mesh
from qftbs.ssfm import (PropagationConfig, check_aliasing, dispersion_operators, propagate_pumps,
                        propagate_signals)

PS = 1e-12


@pytest.fixture(scope="module")
def mesh():
    return make_mesh(1024, 800 * PS)


def _record(fiber, mesh, carriers, profile, p_peak=0.4, q_peak=0.4, **cfg):
    cfg.setdefault("n_steps", 100)
    ap = gaussian_pulse(70 * PS, p_peak, 0.0, mesh)
    aq = gaussian_pulse(70 * PS, q_peak, 0.0, mesh)
    return propagate_pumps(fiber, mesh, ap, aq, PropagationConfig(**cfg), carriers, profile)


@pytest.mark.parametrize("kwargs", [{"n_steps": 0}, {"n_steps": 10, "store_every": 3},
                                    {"n_max": 5}, {"n_max": 0}])
def test_config_validation(kwargs):
    with pytest.raises(ConfigurationError):
        PropagationConfig(**kwargs)


def test_linear_off_is_identity(fiber, mesh, carriers, profile):
    rec = _record(fiber, mesh, carriers, profile, n_steps=20, dispersion=False, spm=False,
                  cpm=False, bs=False)
    g = gaussian_pulse(30 * PS, 1e-3, 0.0, mesh)
    out = propagate_signals(rec, g, 0.5 * g, photon_units=True)
    assert np.array_equal(out.green, g) and np.array_equal(out.blue, 0.5 * g)


def test_pure_dispersion_matches_exact_phase(fiber, mesh, carriers, profile):
    rec = _record(fiber, mesh, carriers, profile, n_steps=20, spm=False, cpm=False, bs=False)
    g = gaussian_pulse(25 * PS, 1e-3, 30 * PS, mesh).astype(complex)
    out = propagate_signals(rec, g, np.zeros_like(g))
    ops = dispersion_operators(profile, carriers, mesh)
    ref = mesh.to_time(np.exp(1j * ops["g"] * fiber.length) * mesh.to_spectrum(g))
    assert np.max(np.abs(out.green - ref)) < 1e-10 * np.max(np.abs(g))


def test_self_phase_modulation_single_pump(fiber, mesh, carriers, profile):
    rec = _record(fiber, mesh, carriers, profile, q_peak=0.0, dispersion=False, cpm=False)
    ap0 = gaussian_pulse(70 * PS, 0.4, 0.0, mesh)
    exact = ap0 * np.exp(1j * fiber.gamma * np.abs(ap0) ** 2 * fiber.length)
    ap, aq = rec.output
    assert np.max(np.abs(ap - exact)) < 1e-8 * np.sqrt(0.4)
    assert np.all(aq == 0)


def test_cross_phase_modulation_pumps(fiber, mesh, carriers, profile):
    rec = _record(fiber, mesh, carriers, profile, dispersion=False)
    ap0 = gaussian_pulse(70 * PS, 0.4, 0.0, mesh)
    exact = ap0 * np.exp(3j * fiber.gamma * np.abs(ap0) ** 2 * fiber.length)
    assert np.max(np.abs(rec.output[0] - exact)) < 1e-6 * np.sqrt(0.4)


def test_pump_energy_conserved(small_record):
    e = small_record.energies
    assert np.max(np.abs(e / e[0] - 1)) < 1e-10


def test_manley_rowe(small_record, small_case):
    g = small_case.signal_photon(40 * PS)
    res = propagate_signals(small_record, g, np.zeros_like(g), diagnostics=True,
                            photon_units=True)
    total = res.n_green + res.n_blue
    assert np.max(np.abs(total - 1)) < 1e-7
    assert res.n_blue[-1] > 0.1  # conversion actually happened
    assert len(res.z) == small_record.config.n_steps + 1


def test_manley_rowe_drift_order(fiber, mesh, carriers, profile):
    # RK4 on a skew-Hermitian generator: |R(ix)|^2 = 1 - x^6/72 + ..., so the
    # photon-number drift over a fixed length scales as h^5
    g = gaussian_pulse(40 * PS, 1.0, 0.0, mesh)
    drift = []
    for n in (50, 100):
        rec = _record(fiber, mesh, carriers, profile, n_steps=n)
        res = propagate_signals(rec, g, np.zeros_like(g), diagnostics=True, photon_units=True)
        total = res.n_green + res.n_blue
        drift.append(abs(total[-1] / total[0] - 1))
    assert 26 < drift[0] / drift[1] < 38


@settings(max_examples=10, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3))
def test_signal_linearity(small_record, small_case, a, b):
    g1 = small_case.signal_photon(40 * PS)
    g2 = small_case.signal_photon(30 * PS, 20 * PS)
    c = complex(a, b)

    def run(x):
        r = propagate_signals(small_record, x, 0.3 * x, photon_units=True)
        return np.concatenate([r.green, r.blue])

    lhs = run(g1 + c * g2)
    rhs = run(g1) + c * run(g2)
    assert np.max(np.abs(lhs - rhs)) < 1e-12 * np.max(np.abs(lhs)) * max(1.0, abs(c))


def test_replay_is_bit_identical(fiber, mesh, carriers, profile):
    fine = _record(fiber, mesh, carriers, profile, n_steps=40, store_every=1)
    coarse = _record(fiber, mesh, carriers, profile, n_steps=40, store_every=10)
    assert np.array_equal(fine.output[0], coarse.output[0])
    g = gaussian_pulse(40 * PS, 1.0, 0.0, mesh)
    a = propagate_signals(fine, g, np.zeros_like(g), photon_units=True)
    b = propagate_signals(coarse, g, np.zeros_like(g), photon_units=True)
    assert np.array_equal(a.green, b.green) and np.array_equal(a.blue, b.blue)


def test_walkoff_centroid(fiber, mesh, carriers, profile):
    rec = _record(fiber, mesh, carriers, profile, n_steps=20, spm=False, cpm=False, bs=False)
    g = gaussian_pulse(25 * PS, 1.0, 0.0, mesh)
    out = propagate_signals(rec, g, g, photon_units=True)
    b1 = {k: profile.derivatives(w, 1)[0] for k, w in carriers.omegas.items()}
    for band, field in (("g", out.green), ("b", out.blue)):
        centroid = mesh.dt * np.sum(mesh.t * np.abs(field) ** 2) / mesh.norm_sq(field)
        expected = (b1[band] - b1["p"]) * fiber.length
        assert centroid == pytest.approx(expected, abs=0.01 * PS)


def test_batch_matches_single(small_record, small_case):
    g1 = small_case.signal_photon(40 * PS)
    g2 = small_case.signal_photon(25 * PS, -10 * PS)
    batch = propagate_signals(small_record, np.stack([g1, g2], 1), np.zeros((len(g1), 2)),
                              photon_units=True)
    one = propagate_signals(small_record, g2, np.zeros_like(g2), photon_units=True)
    assert np.max(np.abs(batch.green[:, 1] - one.green)) < 1e-14


def test_photon_units_equivalence(small_record, small_case):
    w = small_record.carriers.omegas
    a = small_case.signal_photon(40 * PS)
    watts = propagate_signals(small_record, a * np.sqrt(hbar * w["g"]), np.zeros_like(a))
    photons = propagate_signals(small_record, a, np.zeros_like(a), photon_units=True)
    diff = watts.blue / np.sqrt(hbar * w["b"]) - photons.blue
    assert np.max(np.abs(diff)) < 1e-12 * np.max(np.abs(photons.blue))


def test_aliasing_and_shape_errors(small_record):
    mesh = small_record.mesh
    spike = np.zeros(mesh.n_points, complex)
    spike[mesh.n_points // 2] = 1.0
    with pytest.raises(ResolutionError):
        check_aliasing(spike, mesh, "spike")
    with pytest.raises(ResolutionError):
        propagate_signals(small_record, spike, np.zeros_like(spike))
    with pytest.raises(ConfigurationError):
        propagate_signals(small_record, np.zeros(10), np.zeros(10))
    with pytest.raises(ConfigurationError):
        propagate_pumps(FiberSpec(), mesh, np.zeros(10), np.zeros(10), PropagationConfig(),
                        small_record.carriers)
