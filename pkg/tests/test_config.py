from importlib.resources import files

import pytest
import yaml

from qftbs.cases import Case
from qftbs.config import AUTO, EXPERIMENTS, apply_overrides, config_from_dict, load_config
from qftbs.errors import ConfigurationError

from conftest import small_config

BUNDLED = ["long_400", "short_400", "long_200", "short_200"]


def _raw():
    return {
        "experiment": "green",
        "pumps": {"p": {"wavelength_nm": 808, "fwhm_ps": 70, "peak_power_W": 0.4},
                  "q": {"wavelength_nm": 845, "fwhm_ps": 70, "peak_power_W": 0.4}},
    }


@pytest.mark.parametrize("name", BUNDLED)
def test_bundled_configs_load(name):
    path = files("qftbs") / "configs" / f"{name}.yaml"
    cfg = load_config(path)
    assert cfg.experiment in EXPERIMENTS
    assert cfg.basis.t_char_ps == AUTO
    case = Case(cfg)
    assert case.is_long == name.startswith("long")
    assert case.power_p == pytest.approx(float(name.split("_")[1]) / 1000)


def test_defaults_and_round_trip():
    cfg = config_from_dict(_raw())
    assert cfg.fiber.length_m == 20.0 and cfg.solver.n_steps == 400
    assert cfg.mesh.n_points == 4096 and cfg.mesh.window_ps == AUTO
    again = config_from_dict(cfg.to_dict())
    assert again == cfg


@pytest.mark.parametrize("mutate", [
    lambda r: r.update(extra=1),
    lambda r: r["pumps"]["p"].update(colour="red"),
    lambda r: r.update(mesh={"n_point": 1024}),
    lambda r: r.update(experiment="teleport"),
    lambda r: r.update(mesh={"n_points": "many"}),
    lambda r: r.update(mesh={"n_points": 10.5}),
    lambda r: r.update(solver={"spm": "yes"}),
    lambda r: r.update(basis={"n_modes": AUTO}),
    lambda r: r.update(fiber={"length_m": -1}),
    lambda r: r.update(sweep={"points": 2}),
    lambda r: r.update(sweep={"quantity": "max_p11"}),
    lambda r: r.update(solver={"dispersion_order": 6}),
    lambda r: r.pop("pumps"),
    lambda r: r["pumps"].pop("q"),
])
def test_invalid_configs_rejected(mutate):
    raw = _raw()
    mutate(raw)
    with pytest.raises(ConfigurationError):
        config_from_dict(raw)


def test_auto_and_overrides():
    raw = _raw()
    raw["signals"] = {"fwhm_ps": "Auto"}
    cfg = config_from_dict(raw)
    assert cfg.signals.fwhm_ps == AUTO
    cfg = apply_overrides(cfg, n_steps=50, n_modes=7, n_points=2048)
    assert (cfg.solver.n_steps, cfg.basis.n_modes, cfg.mesh.n_points) == (50, 7, 2048)
    with pytest.raises(ConfigurationError):
        apply_overrides(cfg, n_steps=0)


def test_load_config_errors(tmp_path):
    with pytest.raises(ConfigurationError):
        load_config(tmp_path / "missing.yaml")
    bad = tmp_path / "bad.yaml"
    bad.write_text("experiment: [green\n")
    with pytest.raises(ConfigurationError):
        load_config(bad)
    listy = tmp_path / "list.yaml"
    listy.write_text("- 1\n- 2\n")
    with pytest.raises(ConfigurationError):
        load_config(listy)
    good = tmp_path / "good.yaml"
    good.write_text(yaml.safe_dump(_raw()))
    assert load_config(good, n_steps=10).solver.n_steps == 10


def test_case_mesh_and_propagation():
    case = Case(small_config(solver={"n_steps": 120}))
    assert case.mesh.n_points == 1024 and case.mesh.window == pytest.approx(800e-12)
    assert case.propagation.store_every == 10
    assert Case(small_config(solver={"n_steps": 7})).propagation.store_every == 7
    assert case.sweep_grid()[0] == pytest.approx(15e-12)
    auto = Case(config_from_dict(_raw()))
    assert auto.mesh.window == pytest.approx(8 * 4 * auto.analytic.mode_fwhm, rel=1e-12)


def test_carriers_follow_config():
    case = Case(small_config(signals={"phase_match": False}))
    assert case.carriers.g == pytest.approx(673e-9)
    matched = Case(small_config())
    assert abs(matched.carriers.g - 673e-9) > 1e-12
