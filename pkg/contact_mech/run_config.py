import json
import logging
import math
from dataclasses import asdict, dataclass, field, fields
from os import getenv
from typing import Any, Dict, List, Optional

import toml

from contact_mech import to_path
from .config import ConfigError

SCHEMA_VERSION = 1
SEED_VAR = 'CONTACT_MECH_SEED'
RUN_CONFIG_VAR = 'CONTACT_MECH_RUN_CONFIG'
KINDS = ('hamiltonian', 'lagrangian', 'thermo')
MONITORS = {
    'hamiltonian': ('H', 'dissipation', 'energy'),
    'lagrangian': ('L', 'I', 'zdot_evolution'),
    'thermo': ('H', 'dissipation', 'energy'),
}

run_config: Optional['RunConfig'] = None
DEFAULT_RUN_CONFIG = {
    'schema': SCHEMA_VERSION,
    'kind': 'hamiltonian',
    'n': 1,
    'expression': 'z',
    'initial': [0.0, 1.0, 1.0],
    't_span': [0.0, 1.0],
    'step': 1e-3,
    'monitors': ['H', 'dissipation'],
}


@dataclass
class RunConfig:
    """
    One simulation: a system given by an expression over its coordinates (or
    the ideal gas for kind 'thermo'), an initial state and the integration grid.
    """

    schema: int
    kind: str
    initial: List[float]
    n: int = 1
    expression: str = ''
    constants: Dict[str, float] = field(default_factory=dict)
    t_span: List[float] = field(default_factory=lambda: [0.0, 1.0])
    step: float = 1e-3
    monitors: List[str] = field(default_factory=list)
    evolution: bool = False
    seed: int = 0
    tolerances: Dict[str, float] = field(default_factory=dict)
    output_dir: str = '.'
    trajectory_file: str = 'trajectory.csv'
    diagnostics_file: str = 'diagnostics.json'

    @staticmethod
    def from_dict(config: Dict[str, Any]) -> 'RunConfig':
        known = {f.name for f in fields(RunConfig)}
        if unknown := sorted(set(config) - known):
            raise ConfigError(f'unknown field(s) {unknown}')
        for required in ('schema', 'kind', 'initial'):
            if required not in config:
                raise ConfigError(f'missing required field "{required}"')
        try:
            run = RunConfig(
                schema=config['schema'],
                kind=config['kind'],
                initial=[float(v) for v in config['initial']],
                n=int(config.get('n', 3 if config['kind'] == 'thermo' else 1)),
                expression=str(config.get('expression', '')),
                constants={str(k): float(v) for k, v in dict(config.get('constants', {})).items()},
                t_span=[float(v) for v in config.get('t_span', [0.0, 1.0])],
                step=float(config.get('step', 1e-3)),
                monitors=[str(m) for m in config.get('monitors', [])],
                evolution=bool(config.get('evolution', False)),
                seed=config.get('seed', 0),
                tolerances={str(k): float(v) for k, v in dict(config.get('tolerances', {})).items()},
                output_dir=str(config.get('output_dir', '.')),
                trajectory_file=str(config.get('trajectory_file', 'trajectory.csv')),
                diagnostics_file=str(config.get('diagnostics_file', 'diagnostics.json')),
            )
        except (TypeError, ValueError) as e:
            raise ConfigError(f'malformed field value: {e}') from e
        run.validate()
        return run

    @staticmethod
    def from_environment() -> 'RunConfig':
        run = json.loads(getenv(RUN_CONFIG_VAR, json.dumps(DEFAULT_RUN_CONFIG)))
        # Allow individual field overrides.
        run['seed'] = seed_from_environment(run.get('seed', 0))
        return RunConfig.from_dict(run)

    @staticmethod
    def from_file(path: str) -> 'RunConfig':
        """Reads a JSON or TOML run config; CONTACT_MECH_SEED overrides its seed."""
        text = _read_text(path)
        try:
            if path.endswith('.toml'):
                run = toml.loads(text)
            else:
                run = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError(f'{path}: line {e.lineno}, column {e.colno}: {e.msg}') from e
        except toml.decoder.TomlDecodeError as e:
            raise ConfigError(f'{path}: {e}') from e
        if not isinstance(run, dict):
            raise ConfigError(f'{path}: top level must be an object')
        run['seed'] = seed_from_environment(run.get('seed', 0))
        return RunConfig.from_dict(run)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @property
    def dim(self) -> int:
        """Length of the state vector."""
        return 7 if self.kind == 'thermo' else 2 * self.n + 1

    def validate(self) -> None:
        """Raises ConfigError naming the first offending field."""
        if self.schema != SCHEMA_VERSION:
            raise ConfigError(f'schema: unsupported version {self.schema!r}, expected {SCHEMA_VERSION}')
        if self.kind not in KINDS:
            raise ConfigError(f'kind: {self.kind!r} is not one of {KINDS}')
        if self.n < 1:
            raise ConfigError(f'n: must be >= 1, got {self.n}')
        if self.kind == 'thermo' and self.n != 3:
            raise ConfigError(f'n: the ideal gas has n = 3, got {self.n}')
        if self.kind != 'thermo' and not self.expression.strip():
            raise ConfigError(f'expression: required for kind {self.kind!r}')
        if len(self.initial) != self.dim:
            raise ConfigError(f'initial: expected {self.dim} values for kind {self.kind!r}, got {len(self.initial)}')
        if not all(math.isfinite(v) for v in self.initial):
            raise ConfigError(f'initial: non-finite value in {self.initial}')
        if len(self.t_span) != 2 or not self.t_span[1] > self.t_span[0]:
            raise ConfigError(f't_span: need [t0, t1] with t1 > t0, got {self.t_span}')
        if not (math.isfinite(self.step) and self.step > 0):
            raise ConfigError(f'step: must be positive, got {self.step}')
        if unknown := [m for m in self.monitors if m not in MONITORS[self.kind]]:
            raise ConfigError(f'monitors: unknown {unknown} for kind {self.kind!r}, available {MONITORS[self.kind]}')
        if self.kind == 'lagrangian' and self.evolution and 'I' in self.monitors:
            raise ConfigError('monitors: "I" is conserved by the Herglotz flow, not the evolution flow')
        if not isinstance(self.seed, int) or isinstance(self.seed, bool) or self.seed < 0:
            raise ConfigError(f'seed: must be a non-negative integer, got {self.seed!r}')
        if bad := {k: v for k, v in self.tolerances.items() if not v > 0}:
            raise ConfigError(f'tolerances: must be positive, got {bad}')


def _read_text(path: str) -> str:
    try:
        with to_path(path).open() as f:
            return f.read()
    except OSError as e:
        raise ConfigError(f'cannot read run config {path}: {e}') from e


def seed_from_environment(default: Any = 0) -> Any:
    """CONTACT_MECH_SEED when set, else `default`."""
    value = getenv(SEED_VAR)
    if value is None or value == '':
        return default
    try:
        return int(value)
    except ValueError as e:
        raise ConfigError(f'{SEED_VAR}: expected an integer, got {value!r}') from e


def get_run_config() -> RunConfig:
    global run_config
    if run_config is None:
        set_run_config_from_env()
    return run_config


def set_run_config(config: RunConfig) -> None:
    global run_config
    logging.info(f'setting run_config: {json.dumps(config.to_dict(), sort_keys=True)}')
    run_config = config


def set_run_config_from_env() -> None:
    set_run_config(RunConfig.from_environment())
