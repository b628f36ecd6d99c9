"""Pass/fail records of pointwise identity checks."""

import json
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Sequence

import numpy as np


@dataclass
class VerificationReport:
    name: str
    samples: int
    max_residual: float
    tolerance: float
    passed: bool
    details: dict[str, Any] = field(default_factory=dict)

    @property
    def vacuous(self) -> bool:
        return self.samples == 0

    def to_dict(self) -> dict[str, Any]:
        residual = self.max_residual if math.isfinite(self.max_residual) else None
        out = {
            'name': self.name,
            'samples': self.samples,
            'max_residual': residual,
            'tolerance': self.tolerance,
            'pass': self.passed,
        }
        if self.details:
            out['details'] = self.details
        if self.vacuous:
            out['vacuous'] = True
        return out


def make_report(
    name: str,
    residuals: Iterable[float],
    tolerance: float,
    details: Mapping[str, Any] | None = None,
) -> VerificationReport:
    """
    Summarises per-sample residuals. An empty sample set passes vacuously and is
    flagged as such; a non-finite residual always fails.
    """
    values = np.asarray(list(residuals), dtype=float)
    samples = values.shape[0]
    if samples == 0:
        worst = 0.0
    elif not np.all(np.isfinite(values)):
        worst = math.inf
    else:
        worst = float(np.max(np.abs(values)))
    passed = worst <= tolerance
    report = VerificationReport(name, samples, worst, tolerance, passed, dict(details or {}))
    if not passed:
        logging.warning(f'{name}: max residual {worst:.3e} exceeds tolerance {tolerance:.1e}')
    return report


def relative_residual(actual: Sequence[float], expected: Sequence[float]) -> float:
    """max |actual - expected| / (1 + max |expected|)."""
    actual, expected = np.atleast_1d(actual), np.atleast_1d(expected)
    return float(np.max(np.abs(actual - expected)) / (1.0 + np.max(np.abs(expected))))


def all_passed(reports: Iterable[VerificationReport]) -> bool:
    return all(r.passed for r in reports)


def dump_reports(reports: Iterable[VerificationReport]) -> str:
    """Deterministic JSON: sorted keys, two-space indent, LF line endings."""
    return json.dumps([r.to_dict() for r in reports], sort_keys=True, indent=2) + '\n'
