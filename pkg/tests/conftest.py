import numpy as np
import pytest

from qftbs.cases import Case
from qftbs.config import config_from_dict
from qftbs.fiber import DispersionProfile, FiberSpec, phase_matched_carriers

ACCEPTANCE_LINES = []


def small_config(experiment="green", **sections):
    """Short-pump case on a coarse mesh: fast enough for unit tests."""
    raw = {
        "experiment": experiment,
        "name": "small",
        "pumps": {"p": {"wavelength_nm": 808, "fwhm_ps": 70, "peak_power_W": 0.4},
                  "q": {"wavelength_nm": 845, "fwhm_ps": 70, "peak_power_W": 0.4}},
        "mesh": {"n_points": 1024, "window_ps": 800},
        "basis": {"n_modes": 12, "t_char_ps": 40},
        "solver": {"n_steps": 100},
        "sweep": {"fwhm_start_ps": 15, "fwhm_stop_ps": 60, "points": 4},
    }
    for key, value in sections.items():
        raw.setdefault(key, {}).update(value)
    return config_from_dict(raw)


@pytest.fixture(scope="session")
def fiber():
    return FiberSpec()


@pytest.fixture(scope="session")
def profile(fiber):
    return DispersionProfile.from_fiber(fiber)


@pytest.fixture(scope="session")
def carriers(profile, fiber):
    return phase_matched_carriers(profile, fiber.gamma, 0.4, 0.4, 808e-9, 845e-9, 673e-9)


@pytest.fixture(scope="session")
def small_case():
    return Case(small_config())


@pytest.fixture(scope="session")
def small_record(small_case):
    return small_case.record


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def report():
    """Record one acceptance line; printed in the terminal summary."""
    def _report(criterion, passed, detail):
        status = "PASS" if passed else "FAIL"
        ACCEPTANCE_LINES.append(f"criterion {criterion:>2}: {status}  {detail}")
        return passed
    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split(":")[0].split()[1])):
            terminalreporter.write_line(line)
