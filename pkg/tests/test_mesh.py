from math import log, pi, sqrt

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qftbs.errors import ConfigurationError, ResolutionError
from qftbs.mesh import (FWHM_PER_SCALE, FieldEnvelope, HGBasis, gaussian_pulse, hermite_gauss,
                        hg_matrix, make_mesh, project, reconstruct)

PS = 1e-12


def test_mesh_small_grid():
    m = make_mesh(8, 8.0)
    assert m.dt == 1.0
    assert m.d_omega == pytest.approx(2 * pi / 8)
    assert np.allclose(np.diff(np.sort(m.omega)), 2 * pi / 8)
    assert m.t[0] == -4.0 and m.t[4] == 0.0


def test_mesh_spacing():
    m = make_mesh(4096, 4000 * PS)
    assert m.dt == pytest.approx(0.9765625 * PS, rel=1e-12)


@pytest.mark.parametrize("n, window", [(1000, 1.0), (1, 1.0), (64, 0.0), (64, -1.0)])
def test_mesh_rejects_bad_input(n, window):
    with pytest.raises(ConfigurationError):
        make_mesh(n, window)


def test_fft_round_trip(rng):
    m = make_mesh(1024, 2000 * PS)
    a = rng.normal(size=1024) + 1j * rng.normal(size=1024)
    back = m.to_time(m.to_spectrum(a))
    assert np.max(np.abs(back - a)) / np.max(np.abs(a)) < 1e-12


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=2**31 - 1))
def test_parseval(seed):
    m = make_mesh(512, 100 * PS)
    r = np.random.default_rng(seed)
    a = r.normal(size=512) + 1j * r.normal(size=512)
    time_norm = m.norm_sq(a)
    freq_norm = m.dt * np.sum(np.abs(m.to_spectrum(a)) ** 2)
    assert abs(freq_norm / time_norm - 1) < 1e-10


def test_hg_zero_peak_and_parity():
    m = make_mesh(4096, 4000 * PS)
    b = HGBasis(100 * PS)
    psi0 = hermite_gauss(0, b, m)
    k = m.n_points // 2
    assert m.t[k] == 0.0
    assert psi0[k] == pytest.approx(pi ** -0.25 / sqrt(b.scale), rel=1e-10)
    assert abs(hermite_gauss(1, b, m)[k]) < 1e-12 * np.max(np.abs(psi0))


def test_hg_fwhm_is_t_char():
    m = make_mesh(8192, 4000 * PS)
    b = HGBasis(100 * PS)
    psi0 = hermite_gauss(0, b, m)
    above = m.t[psi0 >= 0.5 * psi0.max()]
    assert above[-1] - above[0] == pytest.approx(100 * PS, abs=2 * m.dt)
    assert b.scale * FWHM_PER_SCALE == pytest.approx(100 * PS)


def test_hg_gram_identity():
    m = make_mesh(4096, 4000 * PS)
    psi = hg_matrix(HGBasis(100 * PS, n_modes=25), m)
    gram = m.dt * psi.T @ psi
    assert np.max(np.abs(gram - np.eye(25))) < 1e-8


def test_hg_unresolved_basis():
    m = make_mesh(1024, 1000 * PS)
    with pytest.raises(ResolutionError):
        hg_matrix(HGBasis(2 * PS), m)  # below four samples
    with pytest.raises(ResolutionError):
        hg_matrix(HGBasis(300 * PS, n_modes=25), m)  # high modes leave the window
    with pytest.raises(ConfigurationError):
        hermite_gauss(-1, HGBasis(50 * PS), m)


def test_gaussian_pulse_peak_and_fwhm():
    m = make_mesh(4096, 4000 * PS)
    a = gaussian_pulse(70 * PS, 0.4, 0.0, m)
    assert np.max(np.abs(a) ** 2) == pytest.approx(0.4, rel=1e-12)
    assert np.all(np.angle(a) == 0)


def test_gaussian_half_power_point():
    m = make_mesh(4096, 4096 * 0.875 * PS)  # 35 ps is exactly 40 samples
    a = gaussian_pulse(70 * PS, 0.4, 0.0, m)
    k = m.n_points // 2
    assert abs(a[k + 40]) ** 2 == pytest.approx(0.2, rel=1e-12)
    assert abs(a[k - 40]) ** 2 == pytest.approx(0.2, rel=1e-12)


def test_gaussian_pulse_energy():
    m = make_mesh(4096, 4000 * PS)
    a = gaussian_pulse(70 * PS, 0.4, 100 * PS, m)
    expected = 0.4 * 70 * PS * sqrt(pi / (4 * log(2)))
    assert m.norm_sq(a) == pytest.approx(expected, rel=1e-10)


@given(st.floats(min_value=1e-3, max_value=10.0))
@settings(max_examples=20, deadline=None)
def test_photon_number_linear_in_power(power):
    m = make_mesh(1024, 2000 * PS)
    n1 = FieldEnvelope("g", 673e-9, gaussian_pulse(70 * PS, 1.0, 0.0, m)).photon_number(m)
    n = FieldEnvelope("g", 673e-9, gaussian_pulse(70 * PS, power, 0.0, m)).photon_number(m)
    assert n == pytest.approx(power * n1, rel=1e-12)


def test_gaussian_pulse_errors():
    m = make_mesh(1024, 1000 * PS)
    with pytest.raises(ResolutionError):
        gaussian_pulse(1 * PS, 1.0, 0.0, m)
    with pytest.raises(ResolutionError):
        gaussian_pulse(200 * PS, 1.0, 0.0, m)
    with pytest.raises(ConfigurationError):
        gaussian_pulse(-1.0, 1.0, 0.0, m)


def test_field_envelope_validation():
    m = make_mesh(64, 64 * PS)
    with pytest.raises(ConfigurationError):
        FieldEnvelope("x", 673e-9, np.zeros(64))
    env = FieldEnvelope("g", 673e-9, np.zeros(32))
    with pytest.raises(ConfigurationError):
        env.check_mesh(m)
    with pytest.raises(ValueError):
        env.samples[0] = 1.0


def test_project_basis_vectors():
    m = make_mesh(2048, 2000 * PS)
    b = HGBasis(60 * PS, n_modes=25)
    psi = hg_matrix(b, m)
    c, resid = project(psi[:, 0], b, m)
    assert np.allclose(c, np.eye(25)[0], atol=1e-10) and resid < 1e-8
    c, _ = project(psi[:, 2] + 1j * psi[:, 5], b, m)
    expected = np.zeros(25, complex)
    expected[2], expected[5] = 1, 1j
    assert np.allclose(c, expected, atol=1e-10)


@settings(max_examples=20, deadline=None)
@given(st.floats(min_value=0.72, max_value=1.41))
def test_project_gaussian_of_other_width(ratio):
    """Amplitude widths within a factor ~sqrt(2): expansion decays fast enough for 25 modes."""
    m = make_mesh(4096, 3000 * PS)
    b = HGBasis(60 * PS, n_modes=25)
    # amplitude FWHM = ratio * t_char  <=>  intensity FWHM = ratio * t_char / sqrt(2)
    a = gaussian_pulse(ratio * 60 * PS / sqrt(2), 1.0, 0.0, m)
    _, resid = project(a, b, m)
    assert resid < 1e-6


def test_project_reconstruct_identity(rng):
    m = make_mesh(2048, 2000 * PS)
    b = HGBasis(60 * PS, n_modes=20)
    c = rng.normal(size=20) + 1j * rng.normal(size=20)
    back, resid = project(reconstruct(c, b, m), b, m)
    assert np.max(np.abs(back - c)) < 1e-8 * np.max(np.abs(c))
    assert resid < 1e-8
