"""
Byte-stable writers: CSV with 17 significant digits and '.' decimals, JSON with
sorted keys. Both use LF line endings and accept local or cloud paths.
"""

import json
import logging
from typing import Any, Sequence

import numpy as np

from contact_mech import to_path
from .dynamics import Trajectory


def format_float(x: float) -> str:
    return format(float(x), '.17g')


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, np.generic):
        return _jsonable(obj.item())
    if isinstance(obj, float) and not np.isfinite(obj):
        return None
    return obj


def dumps_json(obj: Any) -> str:
    """Sorted keys, two-space indent, trailing newline; non-finite floats become null."""
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2) + '\n'


def write_text(text: str, path: str) -> None:
    # bytes, so that no platform newline translation happens
    to_path(path).write_bytes(text.encode('utf-8'))
    logging.info(f'wrote {path}')


def write_json(obj: Any, path: str) -> None:
    write_text(dumps_json(obj), path)


def trajectory_csv(traj: Trajectory, labels: Sequence[str] | None = None) -> str:
    """
    Header `t,<state labels>,<diagnostics>` followed by one row per sample.
    Diagnostics keep their registration order.
    """
    labels = list(labels) if labels is not None else list(traj.labels)
    if len(labels) != traj.states.shape[1]:
        raise ValueError(f'{len(labels)} labels for {traj.states.shape[1]} state columns')
    names = list(traj.diagnostics)
    lines = [','.join(['t'] + labels + names)]
    for i, t in enumerate(traj.times):
        row = [t, *traj.states[i], *(traj.diagnostics[name][i] for name in names)]
        lines.append(','.join(format_float(v) for v in row))
    return '\n'.join(lines) + '\n'


def write_trajectory_csv(traj: Trajectory, path: str, labels: Sequence[str] | None = None) -> None:
    write_text(trajectory_csv(traj, labels), path)
