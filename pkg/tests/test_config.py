import json

import pytest

from cerenkov_fiber.config import (
    ConfigError,
    RunConfig,
    config_from_dict,
    load_config,
    make_model,
)


def test_default_config_validates_and_builds():
    cfg = RunConfig().validate()
    model = make_model(cfg)
    assert model.basis.dimension > 1
    assert model.grid.k_min == pytest.approx(0.05)  # 0.05 * cutoff default


def test_fingerprint_stable_and_sensitive():
    a = RunConfig()
    b = RunConfig()
    assert a.fingerprint() == b.fingerprint()
    c = RunConfig(beta=1.5)
    assert c.fingerprint() != a.fingerprint()


def test_round_trip_through_file(tmp_path):
    cfg = RunConfig(radial_count=5, polar_count=3, n_max=1, experiment={"gamma": 0.2})
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cfg.to_dict()))
    loaded = load_config(path)
    assert loaded == cfg
    assert loaded.fingerprint() == cfg.fingerprint()


def test_unknown_fields_rejected():
    with pytest.raises(ConfigError, match="unknown"):
        config_from_dict({"k_mim": 0.1})


def test_precondition_violations_surface_as_config_errors():
    with pytest.raises(ConfigError):
        config_from_dict({"k_min": -1.0})
    with pytest.raises(ConfigError):
        config_from_dict({"radial_spacing": "cubic"})
    with pytest.raises(ConfigError):
        config_from_dict({"smooth_width": 2.0})
    with pytest.raises(ConfigError):
        config_from_dict({"n_max": -1})
    with pytest.raises(ConfigError):
        config_from_dict({"solver_tol": 0.0})
    with pytest.raises(ConfigError):
        config_from_dict({"pairs": 0})


def test_bad_files(tmp_path):
    missing = tmp_path / "nope.json"
    with pytest.raises(ConfigError):
        load_config(missing)
    bad = tmp_path / "bad.json"
    bad.write_text("not json {")
    with pytest.raises(ConfigError):
        load_config(bad)
    array = tmp_path / "array.json"
    array.write_text("[1, 2]")
    with pytest.raises(ConfigError):
        load_config(array)
