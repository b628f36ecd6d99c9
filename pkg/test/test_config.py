import os

import pytest

from contact_mech import config
from contact_mech.config import (
    DEFAULT_CONFIG,
    ConfigError,
    append_config_paths,
    get_config,
    prepend_config_paths,
    read_configs,
    retrieve,
    set_config_paths,
    tolerance,
    update_dict,
)


def test_default_config():
    assert get_config() == DEFAULT_CONFIG
    assert retrieve(["verify", "samples"]) == 200
    assert tolerance("pullback") == 1e-8


def test_config_from_toml(test_resources_path):
    set_config_paths([os.path.join(test_resources_path, "config_override.toml")])
    assert retrieve(["verify", "samples"]) == 7
    assert retrieve(["verify", "seed"]) == 3
    assert tolerance("pullback") == 1e-9
    # untouched keys keep their defaults
    assert tolerance("roundtrip") == 1e-12
    assert retrieve(["thermo", "R"]) == 8.314
    assert retrieve(["thermo", "c"]) == 1.5


def test_configs_apply_left_to_right(test_resources_path):
    toml_path = os.path.join(test_resources_path, "config_override.toml")
    json_path = os.path.join(test_resources_path, "config_override.json")
    set_config_paths([toml_path, json_path])
    assert retrieve(["verify", "samples"]) == 11
    assert retrieve(["verify", "seed"]) == 3
    assert retrieve(["logging", "level"]) == "INFO"
    assert read_configs([json_path, toml_path])["verify"]["samples"] == 7


def test_env_config_paths(monkeypatch, test_resources_path):
    toml_path = os.path.join(test_resources_path, "config_override.toml")
    json_path = os.path.join(test_resources_path, "config_override.json")
    set_config_paths([toml_path])
    append_config_paths([json_path])
    assert os.environ[config.CONFIG_PATH_VAR] == f"{toml_path},{json_path}"
    assert retrieve(["verify", "samples"]) == 11

    set_config_paths([json_path])
    prepend_config_paths([toml_path])
    assert os.environ[config.CONFIG_PATH_VAR] == f"{toml_path},{json_path}"
    assert retrieve(["verify", "samples"]) == 11


def test_config_is_cached(test_resources_path):
    first = get_config()
    assert get_config() is first
    set_config_paths([os.path.join(test_resources_path, "config_override.toml")])
    assert get_config() is not first


def test_bad_config_paths(test_resources_path):
    with pytest.raises(ValueError, match="extensions"):
        set_config_paths([os.path.join(test_resources_path, "run_decay.yaml")])
    with pytest.raises(ValueError, match="do not exist"):
        set_config_paths([os.path.join(test_resources_path, "missing.toml")])
    with pytest.raises(ValueError, match="Failed parsing"):
        set_config_paths([os.path.join(test_resources_path, "run_malformed.json")])
    assert get_config() == DEFAULT_CONFIG


def test_retrieve():
    assert retrieve("logging") == {"level": "WARNING"}
    assert retrieve(["logging", "format"], "plain") == "plain"
    with pytest.raises(ConfigError):
        retrieve(["logging", "format"])
    with pytest.raises(ConfigError):
        retrieve(["plotting", "dpi"])


def test_config_is_read_only():
    with pytest.raises(TypeError):
        get_config()["verify"] = {}


def test_update_dict():
    d1 = {"a": {"b": 1, "c": 2}, "d": 3}
    update_dict(d1, {"a": {"b": 10}, "e": 4})
    assert d1 == {"a": {"b": 10, "c": 2}, "d": 3, "e": 4}
