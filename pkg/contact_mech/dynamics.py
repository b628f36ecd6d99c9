"""
Contact Hamiltonian and Herglotz dynamics: vector fields, the Jacobi bracket,
the fiber derivative, a fixed-step RK4 integrator and invariant monitors.

Hamiltonian states are T*Q x R vectors (q, p, z); Lagrangian states are
(q, qdot, z) vectors. Both layouts are block-wise in the configuration index.
"""

import enum
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .contact import contact_names, reeb, volume_eval, volume_lie_derivative
from .dual import DomainError
from .numeric_diff import DEFAULT_FD_STEP, DimensionError, ScalarField, as_vector
from .verification import VerificationReport, make_report

REGULARITY_TOL = 1e-10
NEWTON_MAX_ITER = 50

Rhs = Callable[[float, np.ndarray], np.ndarray]


class SingularHessianError(ArithmeticError):
    """The velocity Hessian of a Lagrangian is singular where a regular one was needed."""


class ConvergenceError(RuntimeError):
    """An iterative solve did not converge."""


class Regularity(enum.Enum):
    REGULAR = 'regular'
    DEGENERATE = 'degenerate'
    UNKNOWN = 'unknown'


def lagrangian_names(n: int) -> tuple[str, ...]:
    """('q', 'qdot', 'z') for n=1, ('q1', 'q2', 'qdot1', 'qdot2', 'z') for n=2."""
    if n < 1:
        raise DimensionError(f'configuration dimension must be >= 1, got {n}')
    if n == 1:
        return ('q', 'qdot', 'z')
    return (
        tuple(f'q{i + 1}' for i in range(n))
        + tuple(f'qdot{i + 1}' for i in range(n))
        + ('z',)
    )


@dataclass(frozen=True)
class HamiltonianSystem:
    n: int
    H: ScalarField

    def __post_init__(self):
        if self.H.arity != 2 * self.n + 1:
            raise DimensionError(
                f'Hamiltonian of an n={self.n} system takes {2 * self.n + 1} coordinates, '
                f'{self.H.label} takes {self.H.arity}'
            )


@dataclass(frozen=True)
class LagrangianSystem:
    n: int
    L: ScalarField
    regularity: Regularity = Regularity.UNKNOWN

    def __post_init__(self):
        if self.L.arity != 2 * self.n + 1:
            raise DimensionError(
                f'Lagrangian of an n={self.n} system takes {2 * self.n + 1} coordinates, '
                f'{self.L.label} takes {self.L.arity}'
            )

    def velocity_hessian(self, s: Sequence[float]) -> np.ndarray:
        n = self.n
        hess = self.L.hessian(s)
        return hess[n : 2 * n, n : 2 * n]

    def is_regular_at(self, s: Sequence[float]) -> bool:
        return abs(np.linalg.det(self.velocity_hessian(s))) > REGULARITY_TOL


@dataclass
class Trajectory:
    """
    Samples of an integral curve. `kind` is 'contact' for (q, p, z) states and
    'lagrangian' for (q, qdot, z) states.
    """

    times: np.ndarray
    states: np.ndarray
    kind: str = 'contact'
    diagnostics: dict[str, np.ndarray] = field(default_factory=dict)
    blew_up: bool = False
    message: str = ''

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.states = np.atleast_2d(np.asarray(self.states, dtype=float))
        if self.times.shape[0] != self.states.shape[0]:
            raise ValueError(
                f'{self.times.shape[0]} times but {self.states.shape[0]} states'
            )
        if np.any(np.diff(self.times) <= 0):
            raise ValueError('trajectory times must be strictly increasing')

    def __len__(self):
        return self.times.shape[0]

    @property
    def n(self) -> int:
        return (self.states.shape[1] - 1) // 2

    @property
    def labels(self) -> tuple[str, ...]:
        if self.kind == 'lagrangian':
            return lagrangian_names(self.n)
        return contact_names(self.n)


# Vector fields


def contact_hamiltonian_field(
    sys: HamiltonianSystem, x: Sequence[float]
) -> tuple[np.ndarray, float]:
    """
    X^c_H with qdot = H_p, pdot = -H_q - p H_z, zdot = p.H_p - H, and the
    conformal factor R(H) = H_z.
    """
    vec = as_vector(getattr(x, 'vector', x), 2 * sys.n + 1, 'contact point')
    n = sys.n
    value, grad = sys.H.value_and_gradient(vec)
    h_q, h_p, h_z = grad[:n], grad[n : 2 * n], grad[2 * n]
    p = vec[n : 2 * n]
    velocity = np.concatenate([h_p, -h_q - p * h_z, [p @ h_p - value]])
    return velocity, float(h_z)


def evolution_field(sys: HamiltonianSystem, x: Sequence[float]) -> np.ndarray:
    """epsilon_H = X^c_H + H R; horizontal, so eta(epsilon_H) = 0."""
    vec = as_vector(getattr(x, 'vector', x), 2 * sys.n + 1, 'contact point')
    velocity, _ = contact_hamiltonian_field(sys, vec)
    return velocity + sys.H.value(vec) * reeb(vec)


def jacobi_bracket(F: ScalarField, H: ScalarField, x: Sequence[float]) -> float:
    """
    {F, H} = F_q H_p - F_p H_q + (F - p F_p) H_z - (H - p H_p) F_z
    """
    vec = as_vector(getattr(x, 'vector', x))
    if F.arity != H.arity:
        raise DimensionError(f'{F.label} and {H.label} live on different spaces')
    n = (vec.shape[0] - 1) // 2
    f, df = F.value_and_gradient(vec)
    h, dh = H.value_and_gradient(vec)
    p = vec[n : 2 * n]
    return float(
        df[:n] @ dh[n : 2 * n]
        - df[n : 2 * n] @ dh[:n]
        + (f - p @ df[n : 2 * n]) * dh[2 * n]
        - (h - p @ dh[n : 2 * n]) * df[2 * n]
    )


def _acceleration(sys: LagrangianSystem, vec: np.ndarray, evolution: bool) -> tuple[np.ndarray, float]:
    n = sys.n
    value, grad = sys.L.value_and_gradient(vec)
    hess = sys.L.hessian(vec)
    l_q, l_v, l_z = grad[:n], grad[n : 2 * n], grad[2 * n]
    qdot = vec[n : 2 * n]
    zdot = qdot @ l_v if evolution else value
    a = hess[n : 2 * n, n : 2 * n]
    if abs(np.linalg.det(a)) <= REGULARITY_TOL:
        raise SingularHessianError(
            f'{sys.L.label} is degenerate at {vec.tolist()}: velocity Hessian determinant '
            f'{np.linalg.det(a):.3e}'
        )
    rhs = l_q - hess[n : 2 * n, :n] @ qdot - hess[n : 2 * n, 2 * n] * zdot + l_z * l_v
    try:
        qddot = np.linalg.solve(a, rhs)
    except np.linalg.LinAlgError as e:
        raise SingularHessianError(f'{sys.L.label}: {e}') from e
    return qddot, float(zdot)


def herglotz_rhs(sys: LagrangianSystem, s: Sequence[float]) -> np.ndarray:
    """
    (qdot, qddot, zdot) of the Herglotz equations, with qddot from
    L_vv qddot = L_q - L_vq qdot - L_vz L + L_z L_v and zdot = L.

    Raises
    ------
    SingularHessianError when L is degenerate at s.
    """
    vec = as_vector(s, 2 * sys.n + 1, 'Lagrangian state')
    qddot, zdot = _acceleration(sys, vec, evolution=False)
    return np.concatenate([vec[sys.n : 2 * sys.n], qddot, [zdot]])


def evolution_herglotz_rhs(sys: LagrangianSystem, s: Sequence[float]) -> np.ndarray:
    """As `herglotz_rhs` with zdot = qdot.L_v in place of L."""
    vec = as_vector(s, 2 * sys.n + 1, 'Lagrangian state')
    qddot, zdot = _acceleration(sys, vec, evolution=True)
    return np.concatenate([vec[sys.n : 2 * sys.n], qddot, [zdot]])


def fiber_derivative(sys: LagrangianSystem, s: Sequence[float]) -> np.ndarray:
    """(q, qdot, z) -> (q, L_v, z). Defined for degenerate Lagrangians too."""
    vec = as_vector(s, 2 * sys.n + 1, 'Lagrangian state')
    grad = sys.L.gradient(vec)
    n = sys.n
    return np.concatenate([vec[:n], grad[n : 2 * n], [vec[2 * n]]])


def hamiltonian_rhs(sys: HamiltonianSystem) -> Rhs:
    return lambda t, y: contact_hamiltonian_field(sys, y)[0]


def evolution_rhs(sys: HamiltonianSystem) -> Rhs:
    return lambda t, y: evolution_field(sys, y)


def lagrangian_rhs(sys: LagrangianSystem, evolution: bool = False) -> Rhs:
    if evolution:
        return lambda t, y: evolution_herglotz_rhs(sys, y)
    return lambda t, y: herglotz_rhs(sys, y)


# Integration


def _rk4_step(rhs: Rhs, t: float, y: np.ndarray, dt: float) -> np.ndarray:
    k1 = rhs(t, y)
    k2 = rhs(t + 0.5 * dt, y + 0.5 * dt * k1)
    k3 = rhs(t + 0.5 * dt, y + 0.5 * dt * k2)
    k4 = rhs(t + dt, y + dt * k3)
    return y + dt * (k1 + 2 * k2 + 2 * k3 + k4) / 6


Monitor = Callable[[Trajectory], np.ndarray]


def integrate(
    rhs: Rhs,
    x0: Sequence[float],
    t_span: tuple[float, float],
    step: float,
    monitors: Mapping[str, Monitor] | None = None,
    kind: str = 'contact',
) -> Trajectory:
    """
    Classical fixed-step RK4 from t_span[0] to t_span[1]; the last step is
    shortened to land on t_span[1]. A non-finite state or a failed field
    evaluation stops the run, keeping the samples so far and flagging `blew_up`.
    Monitors are evaluated on the finished trajectory, one value per sample.
    """
    t0, t1 = float(t_span[0]), float(t_span[1])
    if step <= 0:
        raise ValueError(f'step must be positive, got {step}')
    if t1 <= t0:
        raise ValueError(f'need t1 > t0, got t_span={t_span}')

    count = max(1, math.ceil((t1 - t0) / step - 1e-9))
    y = as_vector(x0).copy()
    times, states = [t0], [y]
    blew_up, message = False, ''
    for k in range(count):
        t = times[-1]
        t_next = t1 if k == count - 1 else t0 + (k + 1) * step
        try:
            y = _rk4_step(rhs, t, y, t_next - t)
        except (
            DomainError,
            SingularHessianError,
            OverflowError,
            FloatingPointError,
            ZeroDivisionError,
        ) as e:
            blew_up, message = True, f'field evaluation failed at t={t:.6g}: {e}'
            break
        if not np.all(np.isfinite(y)):
            blew_up, message = True, f'non-finite state at t={t_next:.6g}'
            break
        times.append(t_next)
        states.append(y)
    if blew_up:
        logging.warning(f'integration stopped early after {len(times)} samples: {message}')

    traj = Trajectory(np.array(times), np.array(states), kind, blew_up=blew_up, message=message)
    for name, monitor in (monitors or {}).items():
        traj.diagnostics[name] = np.asarray(monitor(traj), dtype=float)
    return traj


# Invariants and monitors


def conserved_I(sys: LagrangianSystem, traj: Trajectory) -> np.ndarray:
    """
    I(t) = exp(-int_{t0}^t L_z) (L - qdot.L_v), with the integral accumulated by
    the trapezoid rule over the stored samples.
    """
    if len(traj) == 0:
        raise ValueError('conserved_I needs a non-empty trajectory')
    n = sys.n
    values, l_z = [], []
    for s in traj.states:
        value, grad = sys.L.value_and_gradient(s)
        values.append(value - s[n : 2 * n] @ grad[n : 2 * n])
        l_z.append(grad[2 * n])
    l_z = np.array(l_z)
    integral = np.concatenate(
        [[0.0], np.cumsum(0.5 * (l_z[1:] + l_z[:-1]) * np.diff(traj.times))]
    )
    return np.exp(-integral) * np.array(values)


def hamiltonian_values(sys: HamiltonianSystem, traj: Trajectory) -> np.ndarray:
    return np.array([sys.H.value(x) for x in traj.states])


def dissipation_residuals(sys: HamiltonianSystem, traj: Trajectory) -> np.ndarray:
    """|dH/dt + R(H) H| / (1 + |H|) per sample, with dH/dt = grad H . X^c_H."""
    out = []
    for x in traj.states:
        value, grad = sys.H.value_and_gradient(x)
        velocity, conformal = contact_hamiltonian_field(sys, x)
        out.append(abs(grad @ velocity + conformal * value) / (1.0 + abs(value)))
    return np.array(out)


def energy_drift(sys: HamiltonianSystem, traj: Trajectory) -> np.ndarray:
    values = hamiltonian_values(sys, traj)
    return np.abs(values - values[0])


def evolution_zdot_residuals(sys: LagrangianSystem, traj: Trajectory) -> np.ndarray:
    """zdot - qdot.L_v along an evolution-Herglotz trajectory, zdot taken from the field."""
    n = sys.n
    out = []
    for s in traj.states:
        zdot = evolution_herglotz_rhs(sys, s)[2 * n]
        out.append(zdot - s[n : 2 * n] @ sys.L.gradient(s)[n : 2 * n])
    return np.array(out)


def monitor_dissipation(
    sys: HamiltonianSystem, traj: Trajectory, tolerance: float = 1e-6
) -> VerificationReport:
    """Checks dH/dt = -R(H) H along `traj`."""
    return make_report('dissipation', dissipation_residuals(sys, traj), tolerance)


def monitor_energy(
    sys: HamiltonianSystem, traj: Trajectory, tolerance: float = 1e-6
) -> VerificationReport:
    """|H(t) - H(0)| along `traj`; meaningful for z-independent H and for evolution flows."""
    return make_report('energy', energy_drift(sys, traj), tolerance)


def hamiltonian_monitors(sys: HamiltonianSystem, names: Sequence[str]) -> dict[str, Monitor]:
    registry = {
        'H': lambda traj: hamiltonian_values(sys, traj),
        'dissipation': lambda traj: dissipation_residuals(sys, traj),
        'energy': lambda traj: energy_drift(sys, traj),
    }
    return _select(registry, names)


def lagrangian_monitors(sys: LagrangianSystem, names: Sequence[str]) -> dict[str, Monitor]:
    registry = {
        'L': lambda traj: np.array([sys.L.value(s) for s in traj.states]),
        'I': lambda traj: conserved_I(sys, traj),
        'zdot_evolution': lambda traj: evolution_zdot_residuals(sys, traj),
    }
    return _select(registry, names)


def _select(registry: Mapping[str, Monitor], names: Sequence[str]) -> dict[str, Monitor]:
    unknown = [n for n in names if n not in registry]
    if unknown:
        raise KeyError(f'unknown monitors {unknown}, available: {sorted(registry)}')
    return {n: registry[n] for n in names}


# Lifts to the tangent bundle


def hamiltonian_lift(sys: HamiltonianSystem, traj: Trajectory, evolution: bool = False) -> np.ndarray:
    """
    Rows (q, p, z, qdot, pdot, zdot, u) of TT*Q x R: each sample with its velocity
    under X^c_H (or epsilon_H) and u = R(H).
    """
    rows = []
    for x in traj.states:
        velocity, conformal = contact_hamiltonian_field(sys, x)
        if evolution:
            velocity = evolution_field(sys, x)
        rows.append(np.concatenate([x, velocity, [conformal]]))
    return np.array(rows)


def lagrangian_contact_lift(sys: LagrangianSystem, traj: Trajectory, evolution: bool = False) -> np.ndarray:
    """
    Pushes a Lagrangian trajectory through the fiber derivative and lifts it:
    rows (q, p, z, qdot, pdot, zdot, u) with p = L_v, pdot the exact time
    derivative of L_v along the solution and u = -L_z.
    """
    n = sys.n
    rhs = evolution_herglotz_rhs if evolution else herglotz_rhs
    rows = []
    for s in traj.states:
        grad = sys.L.gradient(s)
        hess = sys.L.hessian(s)
        ds = rhs(sys, s)
        pdot = hess[n : 2 * n, :] @ ds
        rows.append(np.concatenate([s[:n], grad[n : 2 * n], [s[2 * n]], ds[:n], pdot, [ds[2 * n], -grad[2 * n]]]))
    return np.array(rows)


class ReducedHamiltonian(ScalarField):
    """
    H(q, p, z) = p.qdot - L(q, qdot, z) for a regular L, with qdot(q, p, z) found
    by Newton on L_v(q, qdot, z) = p. Gradients come from the envelope identities
    H_q = -L_q, H_p = qdot, H_z = -L_z, so no derivatives through the solve are
    needed.
    """

    def __init__(self, sys: LagrangianSystem, tol: float = 1e-13):
        self.sys = sys
        self.tol = tol
        super().__init__(contact_names(sys.n), self._value, label=f'H[{sys.L.label}]')

    def velocity(self, x: Sequence[float], seed: Sequence[float] | None = None) -> np.ndarray:
        n = self.sys.n
        vec = as_vector(x, 2 * n + 1, 'contact point')
        q, p, z = vec[:n], vec[n : 2 * n], vec[2 * n]
        qdot = p.copy() if seed is None else as_vector(seed, n, 'velocity seed').copy()
        for _ in range(NEWTON_MAX_ITER):
            s = np.concatenate([q, qdot, [z]])
            residual = self.sys.L.gradient(s)[n : 2 * n] - p
            if np.max(np.abs(residual)) <= self.tol * (1.0 + np.max(np.abs(p))):
                return qdot
            a = self.sys.velocity_hessian(s)
            if abs(np.linalg.det(a)) <= REGULARITY_TOL:
                raise SingularHessianError(f'{self.sys.L.label} is degenerate at {s.tolist()}')
            qdot = qdot - np.linalg.solve(a, residual)
        raise ConvergenceError(f'no velocity with L_v = {p.tolist()} found from seed after {NEWTON_MAX_ITER} steps')

    def _value(self, *args) -> float:
        vec = np.array([float(a) for a in args])
        n = self.sys.n
        qdot = self.velocity(vec)
        return float(vec[n : 2 * n] @ qdot - self.sys.L.value(np.concatenate([vec[:n], qdot, [vec[2 * n]]])))

    def value_and_gradient(self, x: Sequence[float]) -> tuple[float, np.ndarray]:
        n = self.sys.n
        vec = as_vector(x, 2 * n + 1, self.label)
        qdot = self.velocity(vec)
        s = np.concatenate([vec[:n], qdot, [vec[2 * n]]])
        value, grad = self.sys.L.value_and_gradient(s)
        h = float(vec[n : 2 * n] @ qdot - value)
        return h, np.concatenate([-grad[:n], qdot, [-grad[2 * n]]])

    def gradient(self, x: Sequence[float]) -> np.ndarray:
        return self.value_and_gradient(x)[1]

    def value(self, x: Sequence[float]) -> float:
        return self.value_and_gradient(x)[0]

    def hessian(self, x: Sequence[float]) -> np.ndarray:
        vec = as_vector(x, self.arity, self.label)
        m = vec.shape[0]
        hess = np.zeros((m, m))
        for i in range(m):
            up, down = vec.copy(), vec.copy()
            up[i] += DEFAULT_FD_STEP
            down[i] -= DEFAULT_FD_STEP
            hess[:, i] = (self.gradient(up) - self.gradient(down)) / (2 * DEFAULT_FD_STEP)
        return hess


def reduced_hamiltonian(sys: LagrangianSystem) -> ReducedHamiltonian:
    return ReducedHamiltonian(sys)


def legendre_dynamics_defects(
    sys: LagrangianSystem, traj: Trajectory, evolution: bool = False
) -> np.ndarray:
    """
    Max-norm defect, per sample, between the time derivative of FL(s(t)) and the
    contact Hamiltonian (or evolution) field of the reduced Hamiltonian at FL(s(t)).
    """
    ham = HamiltonianSystem(sys.n, reduced_hamiltonian(sys))
    lifted = lagrangian_contact_lift(sys, traj, evolution)
    m = 2 * sys.n + 1
    out = []
    for row in lifted:
        x, xdot = row[:m], row[m : 2 * m]
        expected = evolution_field(ham, x) if evolution else contact_hamiltonian_field(ham, x)[0]
        out.append(float(np.max(np.abs(xdot - expected))))
    return np.array(out)


# Volume identities


def contact_volume_rate(
    sys: HamiltonianSystem, x: Sequence[float], h: float = DEFAULT_FD_STEP
) -> tuple[float, float]:
    """
    (L_X vol, -(n+1) R(H) vol) on the coordinate basis, vol = d eta^n ^ eta and
    X = X^c_H, the Lie derivative taken by central differences.
    """
    vec = as_vector(x, 2 * sys.n + 1, 'contact point')
    rate = volume_lie_derivative(lambda y: contact_hamiltonian_field(sys, y)[0], vec, h)
    _, conformal = contact_hamiltonian_field(sys, vec)
    expected = -(sys.n + 1) * conformal * volume_eval(np.eye(vec.shape[0]))
    return rate, expected


def invariant_volume_rate(
    sys: HamiltonianSystem, x: Sequence[float], h: float = DEFAULT_FD_STEP
) -> float:
    """
    L_X (H^-(n+1) vol) on the coordinate basis, relative to H^-(n+1) vol. Zero
    wherever H != 0.
    """
    vec = as_vector(x, 2 * sys.n + 1, 'contact point')
    value, grad = sys.H.value_and_gradient(vec)
    if value == 0.0:
        raise DomainError('the density H^-(n+1) vol is undefined where H = 0', argument=0.0)
    velocity, _ = contact_hamiltonian_field(sys, vec)
    k = sys.n + 1
    vol = volume_eval(np.eye(vec.shape[0]))
    rate = volume_lie_derivative(lambda y: contact_hamiltonian_field(sys, y)[0], vec, h)
    # L_X(f vol) = X(f) vol + f L_X vol with f = H^-k, divided through by f vol
    return float(-k * (grad @ velocity) / value + rate / vol)
