import os
import json

import numpy as np
import pytest

from contact_mech import config, run_config


@pytest.fixture
def test_resources_path():
    return os.path.abspath(os.path.join(os.path.dirname(__file__), "resources"))

@pytest.fixture
def json_load(test_resources_path):
    def _loader(file_name):
        with open(os.path.join(test_resources_path, file_name), "r") as json_file:
            return json.load(json_file)
    return _loader

@pytest.fixture
def rng():
    return np.random.default_rng(0)

@pytest.fixture(autouse=True)
def default_config(monkeypatch):
    """Every test starts from the library defaults and no cached run config."""
    monkeypatch.delenv(config.CONFIG_PATH_VAR, raising=False)
    monkeypatch.delenv(run_config.SEED_VAR, raising=False)
    monkeypatch.delenv(run_config.RUN_CONFIG_VAR, raising=False)
    config.set_config_paths([])
    monkeypatch.setattr(run_config, "run_config", None)
    yield
    config.set_config_paths([])
