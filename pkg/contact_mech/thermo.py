"""
The classical ideal gas on T*R^3 x R.

Points are (S, V, N, T, -P, mu, U): base entropy, volume and mole number,
fibers temperature, minus the pressure and chemical potential, extension the
internal energy. The contact form is dU - T dS + P dV - mu dN. The pressure is
stored with its sign flipped throughout, so slot 4 holds -P.
"""

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from . import tulczyjew
from .dual import DomainError, exp, log, power, real
from .dynamics import (
    HamiltonianSystem,
    Trajectory,
    contact_hamiltonian_field,
    evolution_field,
    evolution_rhs,
    hamiltonian_lift,
    hamiltonian_monitors,
    hamiltonian_rhs,
    integrate,
    monitor_dissipation,
    monitor_energy,
)
from .legendrian import (
    CONSTRUCTION_TOL,
    TRAJECTORY_TOL,
    MorseFamily,
    SubmanifoldTest,
    evolution_hamiltonian_lagrangian,
    hamiltonian_cotangent_image,
    hamiltonian_legendrian,
    legendrian_from_morse,
    morse_rank_check,
    prolong,
    trajectory_membership,
)
from .numeric_diff import ScalarField, as_vector
from .verification import VerificationReport, make_report, relative_residual

PHASE_NAMES = ('S', 'V', 'N', 'T', 'minus_P', 'mu', 'U')
TRANSPORT_TOL = 1e-7
STRICT_TOL = 1e-9
DENOMINATOR_TOL = 1e-12

# Sampling box for equilibrium states; V and N are drawn log-uniformly.
S_RANGE = (-1.0, 2.0)
V_RANGE = (0.5, 2.0)
N_RANGE = (0.5, 2.0)


class InvalidPartitionError(ValueError):
    """Index split of a quantomorphism is not a partition of its base indices."""


@dataclass(frozen=True)
class GasConstants:
    U0: float = 1.0
    c: float = 1.5
    R: float = 1.0

    def __post_init__(self):
        for name in ('U0', 'c', 'R'):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ValueError(f'gas constant {name} must be a positive number, got {value!r}')

    @property
    def c_bar(self) -> float:
        c = self.c
        return c ** (1 / (1 + c)) + c ** (-c / (1 + c))


@dataclass(frozen=True)
class GasState:
    S: float
    V: float
    N: float
    T: float
    P: float
    mu: float
    U: float

    def __post_init__(self):
        if self.V <= 0 or self.N <= 0:
            raise DomainError(f'volume and mole number must be positive, got V={self.V}, N={self.N}')

    @property
    def vector(self) -> np.ndarray:
        """Phase-space coordinates, with -P in the pressure slot."""
        return np.array([self.S, self.V, self.N, self.T, -self.P, self.mu, self.U])

    @staticmethod
    def from_vector(x: Sequence[float]) -> 'GasState':
        S, V, N, T, minus_p, mu, U = as_vector(x, 7, 'gas phase point')
        return GasState(S, V, N, T, -minus_p, mu, U)


# Potentials


def potentials(k: GasConstants) -> dict[str, ScalarField]:
    """
    Internal energy U(S, V, N), enthalpy B(S, P, N), Helmholtz F(T, V, N),
    Gibbs G(T, P, N) and W(T, P, mu; S). W still depends on the entropy
    through N = S T / ((c+1) R T - mu); see `w_family`.
    """
    U0, c, R = k.U0, k.c, k.R

    def internal_energy(S, V, N):
        return U0 * power(V, -1 / c) * power(N, (c + 1) / c) * exp(S / (c * N * R))

    def enthalpy(S, P, N):
        return k.c_bar * U0 ** (c / (c + 1)) * power(P, 1 / (1 + c)) * N * exp(S / ((c + 1) * N * R))

    def helmholtz(T, V, N):
        return c * N * R * T * (1 + log(N) / c - log(V) / c + log(U0 / (c * R * T)))

    def gibbs(T, P, N):
        return N * R * T * (1 + c + log(N) - log(N * R * T / P) + c * log(U0 / (c * R * T)))

    def w_potential(T, P, mu, S):
        denominator = (c + 1) * R * T - mu
        if abs(real(denominator)) < DENOMINATOR_TOL:
            raise DomainError(
                f'(c+1)RT - mu = {real(denominator):.3e} vanishes, mole number undefined',
                argument=real(denominator),
            )
        moles = S * T / denominator
        return moles * R * T * (
            1 + c + log(moles) - log(moles * R * T / P) + c * log(U0 / (c * R * T))
        ) - mu * moles

    return {
        'U': ScalarField(('S', 'V', 'N'), internal_energy, label='U'),
        'B': ScalarField(('S', 'P', 'N'), enthalpy, label='B'),
        'F': ScalarField(('T', 'V', 'N'), helmholtz, label='F'),
        'G': ScalarField(('T', 'P', 'N'), gibbs, label='G'),
        'W': ScalarField(('T', 'P', 'mu', 'S'), w_potential, label='W'),
    }


def gas_state_from_base(k: GasConstants, S: float, V: float, N: float) -> GasState:
    """The equilibrium state over (S, V, N): T = U_S, P = -U_V, mu = U_N."""
    U = potentials(k)['U']
    value, grad = U.value_and_gradient([S, V, N])
    return GasState(S, V, N, float(grad[0]), -float(grad[1]), float(grad[2]), value)


def sample_base(rng: np.random.Generator, count: int) -> np.ndarray:
    """(S, V, N) rows, S uniform and V, N log-uniform in the default box."""
    S = rng.uniform(*S_RANGE, size=count)
    V = np.exp(rng.uniform(math.log(V_RANGE[0]), math.log(V_RANGE[1]), size=count))
    N = np.exp(rng.uniform(math.log(N_RANGE[0]), math.log(N_RANGE[1]), size=count))
    return np.column_stack([S, V, N])


def sample_states(k: GasConstants, rng: np.random.Generator, count: int) -> list[GasState]:
    return [gas_state_from_base(k, *row) for row in sample_base(rng, count)]


def gas_residuals(k: GasConstants, x: Sequence[float]) -> np.ndarray:
    """
    Scaled residuals of c V^(1/c) R T = U0 N^(1/c) exp(S/(cNR)), PV = NRT,
    mu = (c+1) R T - T S / N and U = U(S, V, N).
    """
    S, V, N, T, minus_p, mu, U = as_vector(x, 7, 'gas phase point')
    if V <= 0 or N <= 0:
        raise DomainError(f'volume and mole number must be positive, got V={V}, N={N}')
    U0, c, R = k.U0, k.c, k.R
    P = -minus_p
    energy_scale = U0 * power(N, 1 / c) * exp(S / (c * N * R))
    internal = potentials(k)['U'].value([S, V, N])
    return np.array(
        [
            (c * power(V, 1 / c) * R * T - energy_scale) / (1 + abs(energy_scale)),
            (P * V - N * R * T) / (1 + abs(N * R * T)),
            (mu - ((c + 1) * R * T - T * S / N)) / (1 + abs(mu)),
            (U - internal) / (1 + abs(internal)),
        ]
    )


def gas_legendrian(k: GasConstants) -> SubmanifoldTest:
    """The Legendrian submanifold of the ideal gas, parametrized as the prolongation of U."""
    U = potentials(k)['U']
    return SubmanifoldTest('gas', 7, lambda x: gas_residuals(k, x), prolong(U).parametrize, 3)


def legendre_consistency(
    k: GasConstants, samples: int, rng: np.random.Generator, tolerance: float = 1e-8
) -> list[VerificationReport]:
    """
    Each potential evaluated on its own base variables against its Legendre
    definition: B = U + PV, F = U - TS, G = F + PV and W = G - mu N, the last
    being zero for the ideal gas.
    """
    pots = potentials(k)
    checks: dict[str, list[float]] = {'B': [], 'F': [], 'G': [], 'W': []}
    for st in sample_states(k, rng, samples):
        checks['B'].append(relative_residual(pots['B'].value([st.S, st.P, st.N]), st.U + st.P * st.V))
        checks['F'].append(relative_residual(pots['F'].value([st.T, st.V, st.N]), st.U - st.T * st.S))
        checks['G'].append(
            relative_residual(pots['G'].value([st.T, st.P, st.N]), st.U - st.T * st.S + st.P * st.V)
        )
        checks['W'].append(abs(pots['W'].value([st.T, st.P, st.mu, st.S])) / (1 + abs(st.U)))
    return [make_report(f'legendre_consistency[{name}]', values, tolerance) for name, values in checks.items()]


# Quantomorphisms of T*R^m x R


def quantomorphism(swapped: Iterable[int], m: int = 3, kept: Iterable[int] | None = None) -> tulczyjew.CoordMap:
    """
    (x^a, x^r, y_a, y_r, u) -> (x^a, y_r, y_a, -x^r, u - x^r y_r) for r in
    `swapped` (0-based), every slot keeping its position. It preserves
    du - y.dx exactly.

    Raises
    ------
    InvalidPartitionError for out-of-range or repeated indices, or when `kept`
    and `swapped` do not partition range(m)
    """
    swapped = list(swapped)
    if m < 1:
        raise InvalidPartitionError(f'base dimension must be >= 1, got {m}')
    if len(set(swapped)) != len(swapped):
        raise InvalidPartitionError(f'repeated index in {swapped}')
    if any(not isinstance(i, (int, np.integer)) or i < 0 or i >= m for i in swapped):
        raise InvalidPartitionError(f'indices {swapped} outside 0..{m - 1}')
    if kept is not None:
        kept = list(kept)
        if set(kept) & set(swapped) or set(kept) | set(swapped) != set(range(m)) or len(set(kept)) != len(kept):
            raise InvalidPartitionError(f'{kept} and {swapped} do not partition 0..{m - 1}')
    J = frozenset(int(i) for i in swapped)

    def forward(x):
        xs, ys, u = x[:m], x[m : 2 * m], x[2 * m]
        new_x = [ys[i] if i in J else xs[i] for i in range(m)]
        new_y = [-xs[i] if i in J else ys[i] for i in range(m)]
        return new_x + new_y + [u - sum((xs[i] * ys[i] for i in J), 0.0)]

    def inverse(y):
        xs, ys, w = y[:m], y[m : 2 * m], y[2 * m]
        old_x = [-ys[i] if i in J else xs[i] for i in range(m)]
        old_y = [xs[i] if i in J else ys[i] for i in range(m)]
        return old_x + old_y + [w - sum((xs[i] * ys[i] for i in J), 0.0)]

    name = f'phi[{",".join(str(i) for i in sorted(J))}]'
    return tulczyjew.CoordMap(name, 2 * m + 1, 2 * m + 1, forward, inverse)


def gas_quantomorphisms() -> dict[str, tulczyjew.CoordMap]:
    """
    phi1: U -> B (swap V), phi2: U -> F (swap S), phi3: F -> G (swap V),
    phi4: G -> W (swap N), and the composites U -> G and U -> W.
    """
    phi1, phi2, phi3, phi4 = (quantomorphism([i]) for i in (1, 0, 1, 2))
    phi32 = tulczyjew.compose(phi3, phi2)
    maps = {
        'phi1': phi1,
        'phi2': phi2,
        'phi3': phi3,
        'phi4': phi4,
        'phi3.phi2': phi32,
        'phi4.phi3.phi2': tulczyjew.compose(phi4, phi32),
    }
    return {name: _renamed(m, name) for name, m in maps.items()}


def _renamed(m: tulczyjew.CoordMap, name: str) -> tulczyjew.CoordMap:
    return tulczyjew.CoordMap(name, m.dim_in, m.dim_out, m.forward, m.inverse_fn)


def gibbs_passage(x: Sequence[float]) -> np.ndarray:
    """(S, V, N, T, -P, mu, U) -> (T, -P, N, -S, -V, mu, U - TS + PV), in closed form."""
    S, V, N, T, minus_p, mu, U = as_vector(x, 7, 'gas phase point')
    return np.array([T, minus_p, N, -S, -V, mu, U - T * S - minus_p * V])


def quantomorphism_reports(
    samples: int, rng: np.random.Generator, tolerance: float = STRICT_TOL
) -> list[VerificationReport]:
    """Strictness of every named quantomorphism, and phi3.phi2 against its closed form."""
    canonical = tulczyjew.ETA_CANONICAL
    reports = [
        tulczyjew.verify_pullback(m, canonical, canonical, samples, rng=rng, tolerance=tolerance, name=f'strict[{name}]')
        for name, m in gas_quantomorphisms().items()
    ]
    chain = gas_quantomorphisms()['phi3.phi2']
    points = tulczyjew.sample_points(rng, 7, samples)
    reports.append(
        make_report(
            'composite[phi3.phi2]',
            [np.max(np.abs(chain.apply(x) - gibbs_passage(x))) for x in points],
            1e-12,
        )
    )
    return reports


# Generator transport: each potential, prolonged on its own base, lands on the
# gas Legendrian after the inverse of its quantomorphism.


def _signed_field(field: ScalarField, names: Sequence[str], flips: Sequence[int], label: str) -> ScalarField:
    """field with the arguments at `flips` negated, so -P can serve as a coordinate."""
    flips = frozenset(flips)

    def fn(*args):
        return field(*[-a if i in flips else a for i, a in enumerate(args)])

    return ScalarField(names, fn, label=label)


def w_family(k: GasConstants) -> MorseFamily:
    """
    W on base (T, -P, mu) with the entropy as fiber. W is homogeneous of
    degree one in S, so dW/dS depends on (T, -P, mu) alone: the critical set is
    the whole S-line over the Gibbs-Duhem surface where that slope vanishes,
    and S stays undetermined there.
    """
    W = _signed_field(potentials(k)['W'], ('T', 'minus_P', 'mu', 'S'), [1], 'W')
    return MorseFamily(W, 3, 1)


def generator_transport(
    k: GasConstants,
    which: str,
    samples: int,
    rng: np.random.Generator | None = None,
    tolerance: float = TRANSPORT_TOL,
) -> VerificationReport:
    """
    For which in {B, F, G, W}: points generated by the potential on its own
    base coordinates, pulled back by phi1, phi2, phi3.phi2 or the full
    quantomorphism, tested against the gas Legendrian.
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    pots = potentials(k)
    maps = gas_quantomorphisms()
    gas = gas_legendrian(k)

    base_of: Callable[[GasState], list[float]]
    if which == 'B':
        generator = prolong(_signed_field(pots['B'], ('S', 'minus_P', 'N'), [1], 'B'))
        base_of, chain = (lambda st: [st.S, -st.P, st.N]), maps['phi1']
    elif which == 'F':
        generator = prolong(pots['F'])
        base_of, chain = (lambda st: [st.T, st.V, st.N]), maps['phi2']
    elif which == 'G':
        generator = prolong(_signed_field(pots['G'], ('T', 'minus_P', 'N'), [1], 'G'))
        base_of, chain = (lambda st: [st.T, -st.P, st.N]), maps['phi3.phi2']
    elif which == 'W':
        generator = None
        base_of, chain = (lambda st: [st.T, -st.P, st.mu]), maps['phi4.phi3.phi2']
    else:
        raise ValueError(f'unknown potential {which!r}, expected one of B, F, G, W')

    residuals = []
    for st in sample_states(k, rng, samples):
        base = base_of(st)
        if which == 'W':
            point, critical = _w_point(k, base, st.S)
            residuals.append(critical)
        else:
            point = generator.point(base)
        residuals.append(gas.residual(chain.inverse.apply(point)))
    return make_report(f'generator_transport[{which}]', residuals, tolerance, {'map': chain.name})


def _w_point(k: GasConstants, base: Sequence[float], entropy: float) -> tuple[np.ndarray, float]:
    """The point of T*R^3 x R generated by W at fiber value `entropy`, with |dW/dS|."""
    fam = w_family(k)
    value, grad = fam.E.value_and_gradient(list(base) + [entropy])
    return np.concatenate([base, grad[:3], [value]]), abs(float(grad[3]))


# Flows of H = TS - NRT + mu N - U


def gas_hamiltonian(k: GasConstants) -> HamiltonianSystem:
    R = k.R

    def hamiltonian(S, V, N, T, minus_p, mu, U):
        return T * S - N * R * T + mu * N - U

    return HamiltonianSystem(3, ScalarField(PHASE_NAMES, hamiltonian, label='H_gas'))


def gas_field_formula(k: GasConstants, x: Sequence[float], evolution: bool = False) -> np.ndarray:
    """
    (S - NR, 0, N, 0, -P, RT, U) in phase coordinates; the evolution field has
    TS - NRT + mu N in the U slot.
    """
    S, V, N, T, minus_p, mu, U = as_vector(x, 7, 'gas phase point')
    R = k.R
    u_rate = T * S - N * R * T + mu * N if evolution else U
    return np.array([S - N * R, 0.0, N, 0.0, minus_p, R * T, u_rate])


def sample_phase(rng: np.random.Generator, count: int) -> np.ndarray:
    """Off-shell phase points: base from the equilibrium box, T, P, U in [0.5, 2], mu in [-1, 1]."""
    base = sample_base(rng, count)
    T = rng.uniform(0.5, 2.0, size=count)
    P = rng.uniform(0.5, 2.0, size=count)
    mu = rng.uniform(-1.0, 1.0, size=count)
    U = rng.uniform(0.5, 2.0, size=count)
    return np.column_stack([base, T, -P, mu, U])


def gas_field_reports(
    k: GasConstants, samples: int, rng: np.random.Generator, tolerance: float = 1e-12
) -> list[VerificationReport]:
    """X^c_H and epsilon_H against their closed forms, and R(H) = -1."""
    sys = gas_hamiltonian(k)
    contact, evolution, conformal = [], [], []
    for x in sample_phase(rng, samples):
        velocity, r_h = contact_hamiltonian_field(sys, x)
        contact.append(relative_residual(velocity, gas_field_formula(k, x)))
        evolution.append(relative_residual(evolution_field(sys, x), gas_field_formula(k, x, evolution=True)))
        conformal.append(r_h + 1.0)
    return [
        make_report('gas_field[contact]', contact, tolerance),
        make_report('gas_field[evolution]', evolution, tolerance),
        make_report('gas_field[R(H)=-1]', conformal, tolerance),
    ]


def gas_flow(
    k: GasConstants,
    x0: Sequence[float],
    t_span: tuple[float, float] = (0.0, 1.0),
    step: float = 1e-3,
    evolution: bool = False,
    tolerance: float = TRAJECTORY_TOL,
) -> tuple[Trajectory, list[VerificationReport]]:
    """
    Integrates X^c_H (or epsilon_H) from x0 and checks the flow along it:
    temperature and volume stay fixed, dH/dt = H for the contact flow, H is
    conserved by the evolution flow, and the lifted samples stay on N_{-H}
    (or im(epsilon_H, R(H))).
    """
    sys = gas_hamiltonian(k)
    rhs = evolution_rhs(sys) if evolution else hamiltonian_rhs(sys)
    monitors = hamiltonian_monitors(sys, ['H', 'energy' if evolution else 'dissipation'])
    traj = integrate(rhs, as_vector(x0, 7, 'gas phase point'), t_span, step, monitors)
    kind = 'evolution' if evolution else 'contact'
    reports = [
        make_report(f'isothermal[{kind}]', np.abs(traj.states[:, 3] - traj.states[0, 3]), tolerance),
        make_report(f'isochoric[{kind}]', np.abs(traj.states[:, 1] - traj.states[0, 1]), tolerance),
    ]
    lifted = hamiltonian_lift(sys, traj, evolution)
    if evolution:
        energy = monitor_energy(sys, traj, tolerance)
        energy.name = 'energy[evolution]'
        reports.append(energy)
        slice_rows = np.delete(lifted, 4 * 3 + 1, axis=1)
        reports.append(trajectory_membership(evolution_hamiltonian_lagrangian(sys), slice_rows, 'trajectory[im(eps_H)]'))
    else:
        dissipation = monitor_dissipation(sys, traj, tolerance)
        dissipation.name = 'dissipation[contact]'
        reports.append(dissipation)
        reports.append(trajectory_membership(hamiltonian_legendrian(sys), lifted, 'trajectory[N_-H]'))
        beta = tulczyjew.beta_c(3)
        image = hamiltonian_cotangent_image(sys)
        reports.append(image.report([beta.apply(row) for row in lifted], CONSTRUCTION_TOL, 'beta_c[N_-H] in im(-T*H)'))
    if traj.blew_up:
        reports.append(make_report(f'completed[{kind}]', [math.inf], 0.0, {'message': traj.message}))
    return traj, reports


# The Lagrangian side: L = T (Sdot - S + NR) + mu (Ndot - N) + pi Vdot + U with
# fiber (T, pi, mu), pi standing for -P.

LAGRANGIAN_BASE = ('S', 'V', 'N', 'Sdot', 'Vdot', 'Ndot', 'U')
LAGRANGIAN_FIBER = ('T', 'minus_P', 'mu')


def gas_lagrangian_family(k: GasConstants) -> MorseFamily:
    R = k.R

    def lagrangian(S, V, N, s_dot, v_dot, n_dot, U, T, minus_p, mu):
        return T * (s_dot - S + N * R) + mu * (n_dot - N) + minus_p * v_dot + U

    field = ScalarField(LAGRANGIAN_BASE + LAGRANGIAN_FIBER, lagrangian, label='L_gas')
    return MorseFamily(field, 7, 3)


def _fiber_seed(x: np.ndarray) -> np.ndarray:
    # (T, -P, mu) sit in the velocity-conjugate slots of T*(TR^3 x R)
    return x[10:13]


def gas_lagrangian_reports(
    k: GasConstants, samples: int, rng: np.random.Generator, tolerance: float = CONSTRUCTION_TOL
) -> tuple[MorseFamily, list[VerificationReport]]:
    """
    The gas Lagrangian family: its rank condition, its critical-fiber equations
    against the flow constraints, and the submanifolds it generates against
    alpha^c(N_{-H}) and alpha^0(im(epsilon_H, R(H))).
    """
    fam = gas_lagrangian_family(k)
    sys = gas_hamiltonian(k)
    legendrian = legendrian_from_morse(fam, seed=_fiber_seed)
    lagrangian = legendrian_from_morse(fam, seed=_fiber_seed, classical=True)
    n_minus_h = hamiltonian_legendrian(sys)
    evolution_side = evolution_hamiltonian_lagrangian(sys)
    alpha = tulczyjew.alpha_c(3)
    alpha0 = tulczyjew.evolution_maps(3)['alpha0']

    ranks, constraints, contact, evolution = [], [], [], []
    for x in sample_phase(rng, samples):
        image = alpha.apply(n_minus_h.point(x))
        total = np.concatenate([image[:7], _fiber_seed(image)])
        ranks.append(0.0 if morse_rank_check(fam, total).ok else math.inf)
        critical = fam.E.gradient(total)[7:]
        constraints.append(float(np.max(np.abs(critical))))
        contact.append(legendrian.residual(image))
        evolution.append(lagrangian.residual(alpha0.apply(evolution_side.point(x))))
    reports = [
        make_report('gas_lagrangian[rank]', ranks, 0.0),
        make_report('gas_lagrangian[flow constraints]', constraints, 1e-12),
        make_report('gas_lagrangian[alpha_c(N_-H)]', contact, tolerance),
        make_report('gas_lagrangian[alpha0(im eps_H)]', evolution, tolerance),
    ]
    return fam, reports

