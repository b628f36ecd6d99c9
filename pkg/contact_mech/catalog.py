"""Named Lagrangians, Hamiltonians and thermodynamic potentials, each with a sampling box."""

from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from .contact import contact_names
from .dynamics import HamiltonianSystem, LagrangianSystem, Regularity, lagrangian_names
from .numeric_diff import ScalarField
from .thermo import GasConstants, potentials


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    kind: str  # 'lagrangian', 'hamiltonian' or 'potential'
    n: int
    factory: Callable[[Mapping[str, float]], ScalarField]
    low: tuple[float, ...]
    high: tuple[float, ...]
    regularity: Regularity = Regularity.UNKNOWN
    constants: Mapping[str, float] = field(default_factory=dict)

    def make_field(self, **overrides: float) -> ScalarField:
        return self.factory({**self.constants, **overrides})

    def system(self, **overrides: float) -> HamiltonianSystem | LagrangianSystem:
        if self.kind == 'lagrangian':
            return LagrangianSystem(self.n, self.make_field(**overrides), self.regularity)
        if self.kind == 'hamiltonian':
            return HamiltonianSystem(self.n, self.make_field(**overrides))
        raise ValueError(f'{self.name} is a {self.kind}, not a dynamical system')

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        return rng.uniform(self.low, self.high, size=(count, len(self.low)))


def _expression(source: str, names: tuple[str, ...], label: str) -> Callable[[Mapping[str, float]], ScalarField]:
    return lambda constants: ScalarField.from_expression(source, names, constants, label)


def _lagrangian(name, source, regularity, n=1, constants=None) -> CatalogEntry:
    names = lagrangian_names(n)
    box = len(names)
    return CatalogEntry(
        name, 'lagrangian', n, _expression(source, names, name), (-1.0,) * box, (1.0,) * box,
        regularity, dict(constants or {}),
    )


def _hamiltonian(name, source, n=1, constants=None) -> CatalogEntry:
    names = contact_names(n)
    box = len(names)
    return CatalogEntry(
        name, 'hamiltonian', n, _expression(source, names, name), (-1.0,) * box, (1.0,) * box,
        constants=dict(constants or {}),
    )


def _potential(name: str, low, high) -> CatalogEntry:
    def factory(constants: Mapping[str, float]) -> ScalarField:
        return potentials(GasConstants(**constants))[name]

    return CatalogEntry(name, 'potential', 0, factory, tuple(low), tuple(high))


ENTRIES: dict[str, CatalogEntry] = {
    e.name: e
    for e in [
        _lagrangian('harmonic', '0.5*qdot^2 - 0.5*q^2', Regularity.REGULAR),
        _lagrangian(
            'damped', '0.5*qdot^2 - 0.5*q^2 - gamma*z', Regularity.REGULAR, constants={'gamma': 0.1}
        ),
        _lagrangian('degenerate', 'qdot', Regularity.DEGENERATE),
        _lagrangian('free', '0.5*qdot^2', Regularity.REGULAR),
        _hamiltonian('gravity', '0.5*p^2 + q'),
        _hamiltonian('decay', 'z'),
        _hamiltonian('damped_oscillator', '0.5*p^2 + 0.5*q^2 + gamma*z', constants={'gamma': 0.1}),
        _hamiltonian(
            'damped_oscillator_2d',
            '0.5*(p1^2 + p2^2) + 0.5*(q1^2 + q2^2) + gamma*z',
            n=2,
            constants={'gamma': 0.1},
        ),
        _potential('U', (-1.0, 0.5, 0.5), (2.0, 2.0, 2.0)),
        _potential('B', (-1.0, 0.5, 0.5), (2.0, 2.0, 2.0)),
        _potential('F', (0.5, 0.5, 0.5), (2.0, 2.0, 2.0)),
        _potential('G', (0.5, 0.5, 0.5), (2.0, 2.0, 2.0)),
        # (c+1)RT - mu stays positive on this box, so N = ST/((c+1)RT - mu) > 0
        _potential('W', (0.5, 0.5, -3.0, 0.5), (2.0, 2.0, -1.0, 2.0)),
    ]
}


def get(name: str) -> CatalogEntry:
    try:
        return ENTRIES[name]
    except KeyError as e:
        raise KeyError(f'no catalog entry {name!r}, available: {sorted(ENTRIES)}') from e


def lagrangians() -> list[CatalogEntry]:
    return [e for e in ENTRIES.values() if e.kind == 'lagrangian']


def hamiltonians() -> list[CatalogEntry]:
    return [e for e in ENTRIES.values() if e.kind == 'hamiltonian']


def fields() -> list[CatalogEntry]:
    return list(ENTRIES.values())
