"""Provides access to library settings: tolerances, sample counts, gas constants."""

import copy
import json
import logging
import os
from typing import Any, Dict, List, Optional

import toml
from frozendict import frozendict

from contact_mech import to_path

CONFIG_PATH_VAR = 'CONTACT_MECH_CONFIG_PATH'

DEFAULT_CONFIG: Dict[str, Any] = {
    'numeric': {
        'fd_step': 1e-5,
        'regularity_tol': 1e-10,
        'newton_max_iter': 50,
    },
    'verify': {
        'samples': 200,
        'composition_samples': 1000,
        'seed': 0,
        'tolerances': {
            'pullback': 1e-8,
            'composition': 1e-12,
            'roundtrip': 1e-12,
            'legendre': 1e-10,
            'construction': 1e-10,
            'trajectory': 1e-6,
            'tangency': 1e-7,
            'diff': 1e-5,
            'dissipation': 1e-6,
            'energy': 1e-6,
            'conserved_I': 1e-5,
            'transport': 1e-7,
            'strict': 1e-9,
            'volume': 1e-5,
        },
    },
    'thermo': {
        'U0': 1.0,
        'c': 1.5,
        'R': 1.0,
        'samples': 100,
        'initial_base': [1.0, 1.0, 1.0],
        't_span': [0.0, 1.0],
        'step': 1e-3,
    },
    'logging': {
        'level': 'WARNING',
    },
}

# We use these globals for lazy initialization, but pylint doesn't like that.
# pylint: disable=global-statement, invalid-name
_config_paths = _val.split(',') if (_val := os.getenv(CONFIG_PATH_VAR)) else []
_config: Optional[frozendict] = None  # Cached config, initialized lazily.


class ConfigError(Exception):
    """
    Error retrieving keys from config, or an invalid configuration value.
    """


def _parse(path: str, text: str) -> dict:
    if path.endswith('.json'):
        return json.loads(text)
    return toml.loads(text)


def _validate_configs(config_paths: list[str]) -> None:
    if bad := [p for p in config_paths if not p.endswith(('.toml', '.json'))]:
        raise ValueError(f'Config files must have ".toml" or ".json" extensions, got: {bad}')

    paths = [to_path(p) for p in config_paths]
    if bad_paths := [p for p in paths if not p.exists()]:
        raise ValueError(f'Some config files do not exist: {bad_paths}')

    # Reading each file to validate syntax:
    exception_by_path = {}
    for raw, p in zip(config_paths, paths):
        with p.open() as f:
            try:
                _parse(raw, f.read())
            except (toml.decoder.TomlDecodeError, json.JSONDecodeError) as e:
                exception_by_path[p] = e
    if exception_by_path:
        msg = 'Failed parsing some config files:'
        for path, exception in exception_by_path.items():
            msg += f'\n\t{path}: {exception}'
        raise ValueError(msg)


_validate_configs(_config_paths)


def set_config_paths(config_paths: list[str]) -> None:
    """Sets the config paths that are used by subsequent calls to get_config.

    If this isn't called, the value of the CONTACT_MECH_CONFIG_PATH environment
    variable is used instead.

    Parameters
    ----------
    config_paths: list[str]
        A list of cloudpathlib-compatible paths to TOML or JSON files.
    """
    global _config_paths, _config
    if _config_paths != config_paths:
        _validate_configs(config_paths)
        _config_paths = config_paths
        if config_paths:
            os.environ[CONFIG_PATH_VAR] = ','.join(_config_paths)
        else:
            os.environ.pop(CONFIG_PATH_VAR, None)
        _config = None  # Make sure the config gets reloaded.


def prepend_config_paths(config_paths: list[str]) -> None:
    """
    Prepend to the list of config paths. Any values in the current
    CONTACT_MECH_CONFIG_PATH take precedence over the provided `config_paths`.
    """
    if _env_var := os.environ.get(CONFIG_PATH_VAR):
        config_paths.extend(_env_var.split(','))

    set_config_paths(config_paths)


def append_config_paths(config_paths: list[str]) -> None:
    """
    Append to the list of config paths. Values in the new configs take
    precedence over the existing CONTACT_MECH_CONFIG_PATH.
    """
    if _env_var := os.environ.get(CONFIG_PATH_VAR):
        config_paths = _env_var.split(',') + config_paths

    set_config_paths(config_paths)


def get_config() -> frozendict:
    """Returns the configuration dictionary: DEFAULT_CONFIG overlaid by every
    config path, left to right.

    Notes
    -----
    Caches the result based on the config paths alone.
    """
    global _config
    if _config is None:  # Lazily initialize the config.
        _config = read_configs(_config_paths)
        if _config_paths:
            logging.info(f'configuration read from {",".join(_config_paths)}')
    return _config


def read_configs(config_paths: List[str]) -> frozendict:
    """Creates a merged configuration from the given config paths.

    For a list of configurations (e.g. ['base.toml', 'override.json']), the
    configurations get applied from left to right on top of DEFAULT_CONFIG.

    Examples
    --------
    A typical override in TOML format:

    [verify]
    samples = 500

    [verify.tolerances]
    pullback = 1e-9

    [thermo]
    R = 8.314

    >>> from contact_mech.config import get_config
    >>> get_config()['thermo']['R']
    8.314
    """
    config: dict = copy.deepcopy(DEFAULT_CONFIG)
    for path in config_paths:
        with to_path(path).open() as f:
            update_dict(config, _parse(path, f.read()))
    return frozendict(config)


def update_dict(d1: Dict, d2: Dict) -> None:
    """Updates the d1 dict with the values from the d2 dict recursively in-place."""
    for k, v2 in d2.items():
        v1 = d1.get(k)
        if isinstance(v1, dict) and isinstance(v2, dict):
            update_dict(v1, v2)
        else:
            d1[k] = v2


def retrieve(key: list[str] | str, default: Any | None = None) -> Any:
    """
    Retrieve key from config, assuming nested key specified as a list of strings.
    """
    if isinstance(key, str):
        key = [key]

    d = get_config()
    for k in key[:-1]:
        if k not in d:
            raise ConfigError(f'Key "{k}" not found in {d}')
        d = d[k]
    k = key[-1]
    if k not in d and default is None:
        raise ConfigError(f'Key "{k}" not found in {d}')
    return d.get(k, default)


def tolerance(name: str) -> float:
    """A named tolerance from the verify.tolerances table."""
    return float(retrieve(['verify', 'tolerances', name]))
