import json
import math

import pytest

from deaforge.config import SCHEMA, default_profile, from_dict, load_config, merge
from deaforge.errors import ConfigError


def test_default_profile_builds(cfg):
    assert cfg.is_default()
    assert cfg.assembly.mat.mu1 == 23000.0
    assert cfg.assembly.mech.theta == pytest.approx(math.radians(77.8), rel=1e-15)
    assert cfg.assembly.layer.n_layers == 4
    assert cfg.electrical.C == 1.69e-9
    assert cfg.drive.amplitude == 220.0
    assert cfg.pad.incline == pytest.approx(math.radians(30.0))
    assert cfg.solver["stiffness_mode"] == "secant"
    assert cfg.structure_mass == pytest.approx(1.14e-3)


def test_profile_covers_schema():
    prof = default_profile()
    assert set(prof) == set(SCHEMA)
    for sec, keys in SCHEMA.items():
        assert set(prof[sec]) == set(keys)


def test_override(cfg):
    c = from_dict({"assembly": {"mass_kg": 4.8e-3}})
    assert c.assembly.mass == 4.8e-3
    assert not c.is_default()
    assert cfg.assembly.mass == 1.2e-3


@pytest.mark.parametrize("override, key", [
    ({"material": {"mu1_pa": 0.0}}, "material.mu1_pa"),
    ({"material": {"mu1_pa": -5.0}}, "material.mu1_pa"),
    ({"layer": {"n_layers": 2.5}}, "layer.n_layers"),
    ({"mechanism": {"theta_deg": 95.0}}, "mechanism.theta_deg"),
    ({"drive": {"waveform": "sine"}}, "drive.waveform"),
    ({"solver": {"stiffness_mode": "chord"}}, "solver.stiffness_mode"),
    ({"solver": {"steps_per_cycle": 50}}, "solver.steps_per_cycle"),
    ({"flyback": {"eta_xfer": True}}, "flyback.eta_xfer"),
    ({"material": {"J1": float("nan")}}, "material.J1"),
    ({"material": {"bogus": 1.0}}, "material.bogus"),
    ({"bogus": {}}, "bogus"),
    ({"pads": {"mu_forward": 2.0}}, "pads.mu_backward"),
    ({"layer": {"L_az_m": 1e-2}}, "layer"),
])
def test_errors_name_the_key(override, key):
    with pytest.raises(ConfigError) as info:
        from_dict(override)
    assert info.value.key == key
    assert key in str(info.value)


def test_merge_rejects_non_table():
    with pytest.raises(ConfigError):
        merge(default_profile(), {"material": 3})


def test_load_toml(tmp_path):
    p = tmp_path / "d.toml"
    p.write_text("[mechanism]\ntheta_deg = 60\n[layer]\nn_layers = 6\n")
    c = load_config(p)
    assert c.assembly.mech.theta == pytest.approx(math.radians(60))
    assert c.assembly.layer.n_layers == 6


def test_load_json_wrapper(tmp_path, cfg):
    p = tmp_path / "d.json"
    p.write_text(json.dumps({"config": cfg.to_dict(), "results": {}}))
    assert load_config(p).raw == cfg.raw


@pytest.mark.parametrize("text, suffix", [("[material\n", ".toml"), ("{", ".json"), ("[1, 2]", ".json")])
def test_load_corrupt(tmp_path, text, suffix):
    p = tmp_path / ("bad" + suffix)
    p.write_text(text)
    with pytest.raises(ConfigError):
        load_config(p)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "nope.toml")


def test_to_dict_is_a_copy(cfg):
    d = cfg.to_dict()
    d["material"]["mu1_pa"] = 1.0
    assert cfg.raw["material"]["mu1_pa"] == 23000.0
