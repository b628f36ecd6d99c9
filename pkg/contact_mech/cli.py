"""
Command line entry point: `contact-mech simulate|verify|thermo`.

Exit codes: 0 success, 1 usage or configuration error (or a failed report for
verify and thermo), 2 numerical failure.
"""

import argparse
import logging
import sys
from typing import Sequence

import numpy as np

from contact_mech import to_path
from . import config, suites, thermo
from .config import ConfigError
from .contact import contact_names
from .dual import DomainError
from .dynamics import (
    ConvergenceError,
    HamiltonianSystem,
    LagrangianSystem,
    SingularHessianError,
    Trajectory,
    evolution_rhs,
    hamiltonian_monitors,
    hamiltonian_rhs,
    integrate,
    lagrangian_monitors,
    lagrangian_names,
    lagrangian_rhs,
)
from .export import write_json, write_text, write_trajectory_csv
from .numeric_diff import ScalarField
from .run_config import RunConfig, get_run_config, seed_from_environment, set_run_config
from .verification import VerificationReport, all_passed, dump_reports, make_report

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERIC = 2

# exceptions that mean the numbers went bad rather than the input
NUMERICAL_ERRORS = (
    DomainError,
    SingularHessianError,
    ConvergenceError,
    ArithmeticError,
    FloatingPointError,
    np.linalg.LinAlgError,
)


def _join(directory: str, name: str) -> str:
    return str(to_path(directory) / name)


# simulate


def _build(run: RunConfig) -> tuple:
    """(rhs, monitors, kind, labels, system) for a validated run config."""
    if run.kind == 'thermo':
        k = thermo.GasConstants(**run.constants) if run.constants else suites.gas_constants()
        system = thermo.gas_hamiltonian(k)
        rhs = evolution_rhs(system) if run.evolution else hamiltonian_rhs(system)
        return rhs, hamiltonian_monitors(system, run.monitors), 'contact', thermo.PHASE_NAMES, system
    if run.kind == 'hamiltonian':
        names = contact_names(run.n)
        system = HamiltonianSystem(run.n, ScalarField.from_expression(run.expression, names, run.constants, 'H'))
        rhs = evolution_rhs(system) if run.evolution else hamiltonian_rhs(system)
        return rhs, hamiltonian_monitors(system, run.monitors), 'contact', names, system
    names = lagrangian_names(run.n)
    system = LagrangianSystem(run.n, ScalarField.from_expression(run.expression, names, run.constants, 'L'))
    return lagrangian_rhs(system, run.evolution), lagrangian_monitors(system, run.monitors), 'lagrangian', names, system


def _tolerance(run: RunConfig, name: str) -> float:
    return run.tolerances.get(name, config.tolerance(name))


def monitor_reports(run: RunConfig, traj: Trajectory) -> list[VerificationReport]:
    """Pass/fail summaries of the residual-type monitors; value monitors (H, L) are only recorded."""
    reports = []
    for name, values in traj.diagnostics.items():
        if name in ('dissipation', 'energy'):
            reports.append(make_report(name, values, _tolerance(run, name)))
        elif name == 'zdot_evolution':
            reports.append(make_report(name, np.abs(values), _tolerance(run, 'trajectory')))
        elif name == 'I':
            drift = np.abs(values - values[0]) / (1.0 + abs(values[0]))
            reports.append(make_report(name, drift, _tolerance(run, 'conserved_I')))
    if traj.blew_up:
        reports.append(make_report('completed', [float('inf')], 0.0, {'message': traj.message}))
    return reports


def cmd_simulate(args: argparse.Namespace) -> int:
    try:
        run = RunConfig.from_file(args.config) if args.config else get_run_config()
        if args.seed is not None:
            run.seed = args.seed
        if args.out is not None:
            run.output_dir = args.out
        run.validate()
        set_run_config(run)
        rhs, monitors, kind, labels, _ = _build(run)
    except (ConfigError, ValueError, KeyError, TypeError) as e:
        logging.error(f'invalid run configuration: {e}')
        print(f'error: {e}', file=sys.stderr)
        return EXIT_CONFIG

    try:
        traj = integrate(rhs, run.initial, tuple(run.t_span), run.step, monitors, kind)
    except NUMERICAL_ERRORS as e:
        logging.error(f'simulation failed: {e}')
        print(f'error: {e}', file=sys.stderr)
        return EXIT_NUMERIC
    reports = monitor_reports(run, traj)

    to_path(run.output_dir).mkdir(parents=True, exist_ok=True)
    write_trajectory_csv(traj, _join(run.output_dir, run.trajectory_file), labels)
    diagnostics = {
        'config': run.to_dict(),
        'samples': len(traj),
        'final_time': float(traj.times[-1]),
        'final_state': traj.states[-1],
        'blew_up': traj.blew_up,
        'message': traj.message,
        'reports': [r.to_dict() for r in reports],
    }
    write_json(diagnostics, _join(run.output_dir, run.diagnostics_file))
    if traj.blew_up or not all_passed(reports):
        return EXIT_NUMERIC
    return EXIT_OK


# verify and thermo


def _emit(reports: list[VerificationReport], out: str | None) -> None:
    text = dump_reports(reports)
    if out is None:
        sys.stdout.write(text)
    else:
        write_text(text, out)


def _samples_and_seed(args: argparse.Namespace, default_samples: int) -> tuple[int, int]:
    samples = default_samples if args.samples is None else args.samples
    seed = args.seed if args.seed is not None else seed_from_environment(config.retrieve(['verify', 'seed']))
    if samples < 0:
        raise ConfigError(f'samples must be non-negative, got {samples}')
    return samples, seed


def cmd_verify(args: argparse.Namespace) -> int:
    try:
        if args.config:
            config.append_config_paths([args.config])
        samples, seed = _samples_and_seed(args, config.retrieve(['verify', 'samples']))
    except (ConfigError, ValueError) as e:
        print(f'error: {e}', file=sys.stderr)
        return EXIT_CONFIG
    try:
        reports = suites.run_suite(args.suite, samples, seed)
    except NUMERICAL_ERRORS as e:
        logging.error(f'suite {args.suite} failed: {e}')
        print(f'error: {e}', file=sys.stderr)
        return EXIT_NUMERIC
    _emit(reports, args.out)
    failed = [r.name for r in reports if not r.passed]
    if failed:
        logging.warning(f'{len(failed)} of {len(reports)} reports failed: {failed}')
        return EXIT_CONFIG
    return EXIT_OK


def cmd_thermo(args: argparse.Namespace) -> int:
    try:
        if args.config:
            config.append_config_paths([args.config])
        samples, seed = _samples_and_seed(args, config.retrieve(['thermo', 'samples']))
        k = suites.gas_constants(U0=args.U0, c=args.c, R=args.R)
    except (ConfigError, ValueError) as e:
        print(f'error: {e}', file=sys.stderr)
        return EXIT_CONFIG

    rng = np.random.default_rng(seed)
    trajectories: dict[str, Trajectory] = {}
    try:
        if args.check == 'potentials':
            reports = suites.potentials_check(k, samples, rng)
        elif args.check == 'legendre-chain':
            reports = suites.legendre_chain_check(k, samples, rng)
        elif args.check == 'flow':
            trajectories, reports = suites.flow_check(k, samples, rng)
        else:
            reports = suites.morse_check(k, samples, rng)
    except NUMERICAL_ERRORS as e:
        logging.error(f'thermo {args.check} failed: {e}')
        print(f'error: {e}', file=sys.stderr)
        return EXIT_NUMERIC

    if args.out is None:
        _emit(reports, None)
    else:
        to_path(args.out).mkdir(parents=True, exist_ok=True)
        _emit(reports, _join(args.out, f'thermo_{args.check}.json'))
        for name, traj in trajectories.items():
            write_trajectory_csv(traj, _join(args.out, f'gas_flow_{name}.csv'), thermo.PHASE_NAMES)
    return EXIT_OK if all_passed(reports) else EXIT_CONFIG


# argument parsing


def _add_sampling(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--samples', type=int, default=None, help='random sample points per check')
    parser.add_argument('--seed', type=int, default=None, help='random seed (default CONTACT_MECH_SEED, then config)')
    parser.add_argument('--config', type=str, default=None, help='library config override (.toml or .json)')


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='contact-mech',
        description='Contact Hamiltonian and Herglotz dynamics, Tulczyjew triples and ideal-gas thermodynamics.',
    )
    parser.add_argument('-v', '--verbose', action='store_true', help='log at INFO level')
    commands = parser.add_subparsers(dest='command', required=True)

    simulate = commands.add_parser('simulate', help='integrate a system from a run config')
    simulate.add_argument('--config', type=str, default=None, help='run config (.json or .toml)')
    simulate.add_argument('--out', type=str, default=None, help='output directory')
    simulate.add_argument('--seed', type=int, default=None, help='overrides the config seed')
    simulate.set_defaults(handler=cmd_simulate)

    verify = commands.add_parser('verify', help='run a verification suite')
    verify.add_argument('suite', choices=[*suites.SUITES, 'all'])
    _add_sampling(verify)
    verify.add_argument('--out', type=str, default=None, help='report file (default stdout)')
    verify.set_defaults(handler=cmd_verify)

    gas = commands.add_parser('thermo', help='ideal-gas checks')
    gas.add_argument('check', choices=['potentials', 'legendre-chain', 'flow', 'morse'])
    gas.add_argument('--U0', type=float, default=None)
    gas.add_argument('--c', type=float, default=None)
    gas.add_argument('--R', type=float, default=None)
    _add_sampling(gas)
    gas.add_argument('--out', type=str, default=None, help='output directory for reports and trajectories')
    gas.set_defaults(handler=cmd_thermo)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_CONFIG
    level = logging.INFO if args.verbose else config.retrieve(['logging', 'level'], 'WARNING')
    logging.basicConfig(level=level, format='%(levelname)s %(name)s: %(message)s')
    return args.handler(args)


if __name__ == '__main__':
    sys.exit(main())
