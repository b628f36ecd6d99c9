"""
Verification suites: every identity of the library run over random samples,
each returning a list of VerificationReports. One generator per suite, seeded
once, so identical seeds give identical reports.
"""

import logging
from typing import Callable

import numpy as np

from . import catalog, thermo, tulczyjew
from .config import retrieve, tolerance
from .dynamics import (
    HamiltonianSystem,
    LagrangianSystem,
    conserved_I,
    contact_volume_rate,
    evolution_rhs,
    hamiltonian_rhs,
    integrate,
    invariant_volume_rate,
    lagrangian_contact_lift,
    lagrangian_rhs,
    legendre_dynamics_defects,
    monitor_dissipation,
    monitor_energy,
    reduced_hamiltonian,
)
from .legendrian import (
    check_legendrian,
    energy_family,
    evolution_hamiltonian_lagrangian,
    hamiltonian_legendrian,
    lagrangian_legendrian,
    legendre_equivalence,
    morse_rank_check,
    right_wing_report,
    trajectory_membership,
)
from .numeric_diff import fd_gradient
from .verification import VerificationReport, make_report

DYNAMICS_T_SPAN = (0.0, 5.0)
DYNAMICS_STEP = 1e-3

Suite = Callable[[int, np.random.Generator], list[VerificationReport]]


def maps_suite(samples: int, rng: np.random.Generator) -> list[VerificationReport]:
    """
    Pullback, composition and roundtrip identities of the three triples, n = 1
    and 2. Compositions use verify.composition_samples points unless `samples`
    is 0.
    """
    pullback, composition, roundtrip = tolerance('pullback'), tolerance('composition'), tolerance('roundtrip')
    eta_T, eta, omega = tulczyjew.ETA_T, tulczyjew.ETA_CANONICAL, tulczyjew.OMEGA_CANONICAL
    composed = int(retrieve(['verify', 'composition_samples'])) if samples else 0
    reports = []
    for n in (1, 2):
        classical = tulczyjew.classical_maps(n)
        evolution = tulczyjew.evolution_maps(n)
        beta, alpha, psi = tulczyjew.beta_c(n), tulczyjew.alpha_c(n), tulczyjew.psi_c(n)
        pullbacks = [
            (beta, eta_T, eta),
            (alpha, eta_T, eta),
            (psi, eta, eta),
            (classical['alpha'], tulczyjew.OMEGA_TANGENT, omega),
            (classical['beta'], tulczyjew.OMEGA_TANGENT, omega),
            (classical['psi'], omega, omega),
            (evolution['alpha0'], tulczyjew.OMEGA_ETA, omega),
            (evolution['beta0'], tulczyjew.OMEGA_ETA, omega),
        ]
        for m, src, dst in pullbacks:
            reports.append(
                tulczyjew.verify_pullback(
                    m, src, dst, samples, rng=rng, tolerance=pullback, name=f'pullback[{m.name}; n={n}]'
                )
            )
        compositions = [
            ('beta_c = psi_c.alpha_c', beta, tulczyjew.compose(psi, alpha)),
            ('psi = beta.alpha^-1', classical['psi'], tulczyjew.compose(classical['beta'], classical['alpha'].inverse)),
            ('kappa.kappa = id', tulczyjew.compose(classical['kappa'], classical['kappa']), tulczyjew.identity(4 * n)),
        ]
        for name, lhs, rhs in compositions:
            reports.append(tulczyjew.composition_report(f'{name}; n={n}', lhs, rhs, composed, rng, composition))
        for m in [beta, alpha, psi, *classical.values(), *evolution.values()]:
            report = tulczyjew.roundtrip_report(m, samples, rng, roundtrip)
            report.name = f'{report.name}; n={n}'
            reports.append(report)
    return reports


def legendrian_suite(samples: int, rng: np.random.Generator) -> list[VerificationReport]:
    """Legendre equivalence and Morse rank over the catalog Lagrangians; tangency and right wing over its Hamiltonians."""
    reports = []
    for entry in catalog.lagrangians():
        sys = entry.system()
        reports.append(legendre_equivalence(sys, samples, rng, entry.low, entry.high, tolerance('legendre')))
        fam = energy_family(sys)
        totals = rng.uniform(-1.0, 1.0, size=(samples, fam.E.arity))
        ranks = [0.0 if morse_rank_check(fam, x).ok else float('inf') for x in totals]
        reports.append(make_report(f'morse_rank[{fam.E.label}]', ranks, 0.0))
        reports.append(
            check_legendrian(
                lagrangian_legendrian(sys),
                tulczyjew.ETA_T,
                samples,
                rng,
                entry.low,
                entry.high,
                expected_dim=2 * sys.n + 1,
                tolerance=tolerance('tangency'),
            )
        )
    for entry in catalog.hamiltonians():
        sys = entry.system()
        reports.append(right_wing_report(sys, samples, rng, entry.low, entry.high, tolerance('construction')))
        reports.append(
            check_legendrian(
                hamiltonian_legendrian(sys),
                tulczyjew.ETA_T,
                samples,
                rng,
                entry.low,
                entry.high,
                expected_dim=2 * sys.n + 1,
                tolerance=tolerance('tangency'),
            )
        )
        reports.append(
            check_legendrian(
                evolution_hamiltonian_lagrangian(sys),
                tulczyjew.OMEGA_ETA,
                samples,
                rng,
                entry.low,
                entry.high,
                expected_dim=2 * sys.n + 1,
                tolerance=tolerance('tangency'),
            )
        )
    return reports


def _lagrangian_dynamics(sys: LagrangianSystem, x0: np.ndarray) -> list[VerificationReport]:
    reports = []
    reduced = HamiltonianSystem(sys.n, reduced_hamiltonian(sys))
    for evolution in (False, True):
        kind = 'evolution' if evolution else 'herglotz'
        traj = integrate(lagrangian_rhs(sys, evolution), x0, DYNAMICS_T_SPAN, DYNAMICS_STEP, kind='lagrangian')
        label = f'{sys.L.label}; {kind}'
        reports.append(
            make_report(f'legendre_dynamics[{label}]', legendre_dynamics_defects(sys, traj, evolution), tolerance('trajectory'))
        )
        lifted = lagrangian_contact_lift(sys, traj, evolution)
        target = evolution_hamiltonian_lagrangian(reduced) if evolution else hamiltonian_legendrian(reduced)
        reports.append(trajectory_membership(target, lifted, f'lift[{label}]', tolerance('trajectory')))
        if not evolution:
            values = conserved_I(sys, traj)
            reports.append(
                make_report(f'conserved_I[{label}]', np.abs(values - values[0]) / (1.0 + abs(values[0])), tolerance('conserved_I'))
            )
        if traj.blew_up:
            reports.append(make_report(f'completed[{label}]', [float('inf')], 0.0, {'message': traj.message}))
    return reports


def _hamiltonian_dynamics(sys: HamiltonianSystem, x0: np.ndarray) -> list[VerificationReport]:
    label = sys.H.label
    contact = integrate(hamiltonian_rhs(sys), x0, DYNAMICS_T_SPAN, DYNAMICS_STEP)
    dissipation = monitor_dissipation(sys, contact, tolerance('dissipation'))
    dissipation.name = f'dissipation[{label}]'
    reports = [dissipation]
    if all(abs(sys.H.gradient(x)[-1]) == 0.0 for x in contact.states):
        energy = monitor_energy(sys, contact, tolerance('energy'))
        energy.name = f'energy[{label}; contact]'
        reports.append(energy)
    evolution = integrate(evolution_rhs(sys), x0, DYNAMICS_T_SPAN, DYNAMICS_STEP)
    energy = monitor_energy(sys, evolution, tolerance('energy'))
    energy.name = f'energy[{label}; evolution]'
    reports.append(energy)
    for name, traj in (('contact', contact), ('evolution', evolution)):
        if traj.blew_up:
            reports.append(make_report(f'completed[{label}; {name}]', [float('inf')], 0.0, {'message': traj.message}))
    return reports


def dynamics_suite(samples: int, rng: np.random.Generator) -> list[VerificationReport]:
    """
    Trajectory checks on t in [0, 5] with step 1e-3, one initial state per
    catalog system, and pointwise volume rates at `samples` points.
    """
    if samples == 0:
        return [make_report('dynamics', [], 0.0)]
    reports = []
    for name in ('harmonic', 'damped'):
        entry = catalog.get(name)
        reports += _lagrangian_dynamics(entry.system(), entry.sample(rng, 1)[0])
    for entry in catalog.hamiltonians():
        sys = entry.system()
        reports += _hamiltonian_dynamics(sys, entry.sample(rng, 1)[0])
        volume, invariant = [], []
        for x in entry.sample(rng, samples):
            rate, expected = contact_volume_rate(sys, x)
            volume.append(abs(rate - expected) / (1.0 + abs(expected)))
            if abs(sys.H.value(x)) > 1e-3:
                invariant.append(abs(invariant_volume_rate(sys, x)))
        reports.append(make_report(f'volume_rate[{entry.name}]', volume, tolerance('volume')))
        reports.append(make_report(f'invariant_volume[{entry.name}]', invariant, tolerance('volume')))
    return reports


def diff_suite(samples: int, rng: np.random.Generator) -> list[VerificationReport]:
    """Exact gradients against central differences for every catalog field."""
    reports = []
    for entry in catalog.fields():
        f = entry.make_field()
        residuals = []
        for x in entry.sample(rng, samples):
            exact = f.gradient(x)
            residuals.append(float(np.max(np.abs(exact - fd_gradient(f, x)))) / (1.0 + float(np.max(np.abs(exact)))))
        reports.append(make_report(f'gradient[{entry.name}]', residuals, tolerance('diff')))
    return reports


def thermo_suite(samples: int, rng: np.random.Generator) -> list[VerificationReport]:
    k = gas_constants()
    return (
        potentials_check(k, samples, rng)
        + legendre_chain_check(k, samples, rng)
        + flow_check(k, samples, rng)[1]
        + morse_check(k, samples, rng)
    )


# Thermodynamic checks, shared with the `thermo` command.


def gas_constants(**overrides: float | None) -> thermo.GasConstants:
    """Config defaults overlaid by the non-None overrides."""
    values = {key: float(retrieve(['thermo', key])) for key in ('U0', 'c', 'R')}
    values.update({key: v for key, v in overrides.items() if v is not None})
    return thermo.GasConstants(**values)


def potentials_check(k: thermo.GasConstants, samples: int, rng: np.random.Generator) -> list[VerificationReport]:
    gas = thermo.gas_legendrian(k)
    low = (thermo.S_RANGE[0], thermo.V_RANGE[0], thermo.N_RANGE[0])
    high = (thermo.S_RANGE[1], thermo.V_RANGE[1], thermo.N_RANGE[1])
    points = [st.vector for st in thermo.sample_states(k, rng, samples)]
    return thermo.legendre_consistency(k, samples, rng) + [
        gas.report(points, tolerance('strict'), 'gas_legendrian[prolonged U]'),
        check_legendrian(gas, tulczyjew.ETA_CANONICAL, samples, rng, low, high, 3, tolerance('tangency')),
    ]


def legendre_chain_check(k: thermo.GasConstants, samples: int, rng: np.random.Generator) -> list[VerificationReport]:
    transports = [thermo.generator_transport(k, which, samples, rng, tolerance('transport')) for which in 'BFGW']
    return transports + thermo.quantomorphism_reports(samples, rng, tolerance('strict'))


def flow_check(k: thermo.GasConstants, samples: int, rng: np.random.Generator) -> tuple[dict, list[VerificationReport]]:
    """Field formulas at sampled phase points, then both flows from the configured equilibrium state."""
    reports = thermo.gas_field_reports(k, samples, rng, tolerance('composition'))
    x0 = thermo.gas_state_from_base(k, *retrieve(['thermo', 'initial_base'])).vector
    t_span = tuple(retrieve(['thermo', 't_span']))
    step = float(retrieve(['thermo', 'step']))
    trajectories = {}
    for evolution in (False, True):
        traj, flow_reports = thermo.gas_flow(k, x0, t_span, step, evolution, tolerance('trajectory'))
        trajectories['evolution' if evolution else 'contact'] = traj
        reports += flow_reports
    return trajectories, reports


def morse_check(k: thermo.GasConstants, samples: int, rng: np.random.Generator) -> list[VerificationReport]:
    _, reports = thermo.gas_lagrangian_reports(k, samples, rng, tolerance('construction'))
    return reports


SUITES: dict[str, Suite] = {
    'maps': maps_suite,
    'legendrian': legendrian_suite,
    'dynamics': dynamics_suite,
    'diff': diff_suite,
    'thermo': thermo_suite,
}


def run_suite(name: str, samples: int, seed: int) -> list[VerificationReport]:
    """Runs one suite, or every suite in order for 'all'."""
    names = list(SUITES) if name == 'all' else [name]
    if unknown := [n for n in names if n not in SUITES]:
        raise KeyError(f'unknown suite {unknown}, available: {sorted(SUITES)} or all')
    reports = []
    for suite in names:
        logging.info(f'running suite {suite} with {samples} samples, seed {seed}')
        reports += SUITES[suite](samples, np.random.default_rng(seed))
    return reports
