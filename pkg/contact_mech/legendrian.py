"""
Legendrian and Lagrangian submanifolds as membership tests.

A submanifold is a residual function on its ambient space, zero exactly on the
submanifold, together with an optional parametrization that emits points on
it. Morse families generate them through their fiber-critical sets.
"""

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import tulczyjew
from .contact import contact_names
from .dual import DomainError
from .dynamics import (
    ConvergenceError,
    HamiltonianSystem,
    LagrangianSystem,
    Regularity,
    contact_hamiltonian_field,
    lagrangian_names,
    reduced_hamiltonian,
)
from .numeric_diff import DimensionError, ScalarField, as_vector, fd_jacobian
from .verification import VerificationReport, make_report

NEWTON_MAX_ITER = 50
CRITICAL_TOL = 1e-12
RANK_RTOL = 1e-10
CONSTRUCTION_TOL = 1e-10
TRAJECTORY_TOL = 1e-6
TANGENCY_TOL = 1e-7


class NoCriticalFiberError(ConvergenceError):
    """No point of the fiber-critical set was found near the seed."""


@dataclass(frozen=True)
class MorseFamily:
    """
    E(x; e) on a trivial bundle: the first `n_base` coordinates of E are the base
    x, the remaining `n_fiber` the fiber e.
    """

    E: ScalarField
    n_base: int
    n_fiber: int

    def __post_init__(self):
        if self.E.arity != self.n_base + self.n_fiber:
            raise DimensionError(
                f'{self.E.label} takes {self.E.arity} coordinates, '
                f'family declares {self.n_base} base + {self.n_fiber} fiber'
            )

    @property
    def base_names(self) -> tuple[str, ...]:
        return self.E.names[: self.n_base]

    @property
    def fiber_names(self) -> tuple[str, ...]:
        return self.E.names[self.n_base :]


@dataclass(frozen=True)
class RankCheck:
    rank: int
    ok: bool
    singular_values: tuple[float, ...] = ()


@dataclass
class SubmanifoldTest:
    """
    membership: ambient point -> residual vector, zero on the submanifold
    parametrize: parameter vector -> ambient point on the submanifold
    """

    name: str
    ambient_dim: int
    membership: Callable[[np.ndarray], np.ndarray]
    parametrize: Callable[[Sequence[float]], np.ndarray] | None = None
    param_dim: int | None = None
    details: dict = field(default_factory=dict)

    def residuals(self, x: Sequence[float]) -> np.ndarray:
        return np.atleast_1d(np.asarray(self.membership(as_vector(x)), dtype=float))

    def residual(self, x: Sequence[float]) -> float:
        """Max-norm of the membership residual."""
        r = self.residuals(x)
        return float(np.max(np.abs(r))) if r.size else 0.0

    def contains(self, x: Sequence[float], tol: float = CONSTRUCTION_TOL) -> bool:
        return self.residual(x) <= tol

    def point(self, params: Sequence[float]) -> np.ndarray:
        if self.parametrize is None:
            raise ValueError(f'{self.name} has no parametrization')
        vec = as_vector(params, self.param_dim, f'{self.name} parameters')
        return as_vector(self.parametrize(vec))

    def sample(
        self,
        rng: np.random.Generator,
        count: int,
        low: float | Sequence[float] = -1.0,
        high: float | Sequence[float] = 1.0,
    ) -> tuple[np.ndarray, np.ndarray]:
        """(parameters, points) for `count` uniform parameters in the box [low, high]."""
        params = rng.uniform(low, high, size=(count, self.param_dim))
        points = np.array([self.point(p) for p in params]).reshape(count, self.ambient_dim)
        return params, points

    def report(
        self, points: Sequence[Sequence[float]], tolerance: float, name: str | None = None
    ) -> VerificationReport:
        return make_report(name or f'membership[{self.name}]', [self.residual(x) for x in points], tolerance)


# Morse families


def morse_rank_check(fam: MorseFamily, x: Sequence[float]) -> RankCheck:
    """
    Rank of the n_fiber x (n_base + n_fiber) block of second derivatives of E
    with one fiber index, computed by SVD with threshold 1e-10 * sigma_max.
    """
    vec = as_vector(x, fam.E.arity, f'{fam.E.label} point')
    if fam.n_fiber == 0:
        return RankCheck(0, True)
    block = fam.E.hessian(vec)[fam.n_base :, :]
    sigma = np.linalg.svd(block, compute_uv=False)
    top = sigma[0] if sigma.size else 0.0
    rank = int(np.sum(sigma > RANK_RTOL * top)) if top > 0 else 0
    return RankCheck(rank, rank == fam.n_fiber, tuple(float(s) for s in sigma))


def critical_fiber(fam: MorseFamily, base: Sequence[float], seed: Sequence[float] | None = None) -> np.ndarray:
    """
    Solves dE/de (base; e) = 0 for e by damped Newton from `seed`, with
    least-squares steps so that rank-deficient fiber Hessians still move.

    Raises
    ------
    NoCriticalFiberError after NEWTON_MAX_ITER steps without convergence
    """
    b = as_vector(base, fam.n_base, 'base point')
    k = fam.n_fiber
    if k == 0:
        return np.zeros(0)
    e = np.zeros(k) if seed is None else as_vector(seed, k, 'fiber seed').copy()

    def fiber_gradient(fiber: np.ndarray) -> np.ndarray:
        return fam.E.gradient(np.concatenate([b, fiber]))[fam.n_base :]

    g = fiber_gradient(e)
    for _ in range(NEWTON_MAX_ITER):
        norm = np.max(np.abs(g))
        if norm <= CRITICAL_TOL * (1.0 + np.max(np.abs(e))):
            return e
        hess = fam.E.hessian(np.concatenate([b, e]))[fam.n_base :, fam.n_base :]
        step = np.linalg.lstsq(hess, -g, rcond=None)[0]
        t = 1.0
        while True:
            trial = e + t * step
            try:
                g_trial = fiber_gradient(trial)
                if np.max(np.abs(g_trial)) < norm or t < 1.0 / 64:
                    break
            except DomainError:
                if t < 1.0 / 64:
                    raise
            t /= 2
        e, g = trial, g_trial
    raise NoCriticalFiberError(
        f'no critical fiber of {fam.E.label} found at base {b.tolist()} '
        f'after {NEWTON_MAX_ITER} iterations (|dE/de| = {np.max(np.abs(g)):.3e})'
    )


def _split_ambient(x: np.ndarray, m: int, classical: bool) -> tuple[np.ndarray, np.ndarray, float | None]:
    expected = 2 * m if classical else 2 * m + 1
    if x.shape[0] != expected:
        raise DimensionError(f'expected a point of dimension {expected}, got {x.shape[0]}')
    return x[:m], x[m : 2 * m], None if classical else x[2 * m]


def legendrian_from_morse(
    fam: MorseFamily,
    seed: Callable[[np.ndarray], Sequence[float]] | None = None,
    classical: bool = False,
) -> SubmanifoldTest:
    """
    N = {(x, dE/dx, E) : dE/de = 0} in T*B x R, or the Lagrangian
    {(x, dE/dx) : dE/de = 0} in T*B when `classical`.

    `seed` maps a candidate ambient point to the fiber guess of the critical
    solve; without one the solve starts at e = 0. Parametrizations always
    start at e = 0.
    """
    m = fam.n_base

    def generated(base: np.ndarray, fiber: np.ndarray) -> tuple[np.ndarray, float, np.ndarray]:
        value, grad = fam.E.value_and_gradient(np.concatenate([base, fiber]))
        return grad[:m], value, grad[m:]

    def membership(x: np.ndarray) -> np.ndarray:
        base, p, z = _split_ambient(x, m, classical)
        fiber = critical_fiber(fam, base, None if seed is None else seed(x))
        dx, value, de = generated(base, fiber)
        parts = [de, p - dx]
        if not classical:
            parts.append([z - value])
        return np.concatenate(parts)

    def parametrize(base: Sequence[float]) -> np.ndarray:
        base = as_vector(base, m, 'base point')
        dx, value, _ = generated(base, critical_fiber(fam, base))
        return np.concatenate([base, dx] if classical else [base, dx, [value]])

    return SubmanifoldTest(
        f'{"lagrangian" if classical else "legendrian"}[{fam.E.label}]',
        2 * m if classical else 2 * m + 1,
        membership,
        parametrize,
        m,
    )


def prolong(F: ScalarField) -> SubmanifoldTest:
    """The first prolongation x -> (x, dF(x), F(x)) in T*B x R."""
    m = F.arity

    def membership(x: np.ndarray) -> np.ndarray:
        base, p, z = _split_ambient(x, m, classical=False)
        value, grad = F.value_and_gradient(base)
        return np.concatenate([p - grad, [z - value]])

    def parametrize(base: Sequence[float]) -> np.ndarray:
        value, grad = F.value_and_gradient(base)
        return np.concatenate([as_vector(base), grad, [value]])

    return SubmanifoldTest(f'j1[{F.label}]', 2 * m + 1, membership, parametrize, m)


def energy_family(sys: LagrangianSystem, sign: float = 1.0) -> MorseFamily:
    """
    sign * E with E(q, p, z; qdot) = p.qdot - L(q, qdot, z), over T*Q x R with
    fiber the velocities.
    """
    n = sys.n
    names = contact_names(n) + lagrangian_names(n)[n : 2 * n]

    def energy(*args):
        q, p, z, qdot = args[:n], args[n : 2 * n], args[2 * n], args[2 * n + 1 :]
        pv = sum((pi * vi for pi, vi in zip(p, qdot)), 0.0)
        return sign * (pv - sys.L(*q, *qdot, z))

    label = 'E' if sign > 0 else '-E'
    return MorseFamily(ScalarField(names, energy, label=f'{label}[{sys.L.label}]'), 2 * n + 1, n)


# Submanifolds of the contact triple. Points of TT*Q x R are
# (q, p, z, qdot, pdot, zdot, u).


def _tangent_blocks(x: np.ndarray, n: int) -> tuple:
    if x.shape[0] != 4 * n + 3:
        raise DimensionError(f'expected a TT*Q x R point of dimension {4 * n + 3}, got {x.shape[0]}')
    o = 2 * n + 1
    return x[:o], x[n : 2 * n], x[o : o + n], x[o + n : o + 2 * n], x[o + 2 * n], x[o + 2 * n + 1]


def _lagrangian_state(q, qdot, z) -> np.ndarray:
    return np.concatenate([q, qdot, [z]])


def hamiltonian_legendrian(sys: HamiltonianSystem) -> SubmanifoldTest:
    """
    N_{-H} = {(q, p, z, H_p, -H_z p - H_q, p.H_p - H, H_z)}, the image of
    (X^c_H, R(H)).
    """
    n = sys.n

    def membership(x: np.ndarray) -> np.ndarray:
        base, _, qdot, pdot, zdot, u = _tangent_blocks(x, n)
        velocity, conformal = contact_hamiltonian_field(sys, base)
        return np.concatenate(
            [qdot - velocity[:n], pdot - velocity[n : 2 * n], [zdot - velocity[2 * n], u - conformal]]
        )

    def parametrize(base: Sequence[float]) -> np.ndarray:
        velocity, conformal = contact_hamiltonian_field(sys, base)
        return np.concatenate([as_vector(base), velocity, [conformal]])

    return SubmanifoldTest(f'N[-{sys.H.label}]', 4 * n + 3, membership, parametrize, 2 * n + 1)


def hamiltonian_cotangent_image(sys: HamiltonianSystem) -> SubmanifoldTest:
    """im(-T*H) in T*(T*Q x R) x R: (q, p, z, -H_q, -H_p, -H_z, -H)."""
    n = sys.n

    def membership(y: np.ndarray) -> np.ndarray:
        x, covector, w = _split_ambient(y, 2 * n + 1, classical=False)
        value, grad = sys.H.value_and_gradient(x)
        return np.concatenate([covector + grad, [w + value]])

    def parametrize(base: Sequence[float]) -> np.ndarray:
        value, grad = sys.H.value_and_gradient(base)
        return np.concatenate([as_vector(base), -grad, [-value]])

    return SubmanifoldTest(f'im(-T*{sys.H.label})', 4 * n + 3, membership, parametrize, 2 * n + 1)


def lagrangian_legendrian(sys: LagrangianSystem) -> SubmanifoldTest:
    """N_L = {(q, L_v, z, qdot, L_z L_v + L_q, L, -L_z)}, parametrized by (q, qdot, z)."""
    n = sys.n

    def formula(s: np.ndarray) -> np.ndarray:
        value, grad = sys.L.value_and_gradient(s)
        l_q, l_v, l_z = grad[:n], grad[n : 2 * n], grad[2 * n]
        return np.concatenate([s[:n], l_v, [s[2 * n]], s[n : 2 * n], l_z * l_v + l_q, [value, -l_z]])

    def membership(x: np.ndarray) -> np.ndarray:
        base, _, qdot, _, _, _ = _tangent_blocks(x, n)
        expected = formula(_lagrangian_state(base[:n], qdot, base[2 * n]))
        return np.delete(x - expected, np.r_[0:n, 2 * n, 2 * n + 1 : 3 * n + 1])

    def parametrize(s: Sequence[float]) -> np.ndarray:
        return formula(as_vector(s, 2 * n + 1, 'Lagrangian state'))

    return SubmanifoldTest(f'N[{sys.L.label}]', 4 * n + 3, membership, parametrize, 2 * n + 1)


def lagrangian_cotangent_image(sys: LagrangianSystem) -> SubmanifoldTest:
    """im(T*L) in T*(TQ x R) x R: (q, qdot, z, L_q, L_v, L_z, L)."""
    n = sys.n

    def membership(y: np.ndarray) -> np.ndarray:
        s, covector, w = _split_ambient(y, 2 * n + 1, classical=False)
        value, grad = sys.L.value_and_gradient(s)
        return np.concatenate([covector - grad, [w - value]])

    def parametrize(s: Sequence[float]) -> np.ndarray:
        value, grad = sys.L.value_and_gradient(s)
        return np.concatenate([as_vector(s), grad, [value]])

    return SubmanifoldTest(f'im(T*{sys.L.label})', 4 * n + 3, membership, parametrize, 2 * n + 1)


def energy_legendrian(sys: LagrangianSystem) -> SubmanifoldTest:
    """
    N_{-E} in T*(T*Q x R) x R, in closed form: with qdot = -b, the slots
    (L_q, -qdot, L_z, L - p.qdot) under the constraint p = L_v.
    """
    n = sys.n

    def membership(y: np.ndarray) -> np.ndarray:
        x, covector, w = _split_ambient(y, 2 * n + 1, classical=False)
        q, p, z = x[:n], x[n : 2 * n], x[2 * n]
        a, v = covector[:n], covector[2 * n]
        qdot = -covector[n : 2 * n]
        value, grad = sys.L.value_and_gradient(_lagrangian_state(q, qdot, z))
        return np.concatenate([a - grad[:n], p - grad[n : 2 * n], [v - grad[2 * n], w - (value - p @ qdot)]])

    def parametrize(s: Sequence[float]) -> np.ndarray:
        s = as_vector(s, 2 * n + 1, 'Lagrangian state')
        value, grad = sys.L.value_and_gradient(s)
        q, qdot, z = s[:n], s[n : 2 * n], s[2 * n]
        p = grad[n : 2 * n]
        return np.concatenate([q, p, [z], grad[:n], -qdot, [grad[2 * n], value - p @ qdot]])

    return SubmanifoldTest(f'N[-E[{sys.L.label}]]', 4 * n + 3, membership, parametrize, 2 * n + 1)


def legendre_equivalence(
    sys: LagrangianSystem,
    samples: int,
    rng: np.random.Generator | None = None,
    low: float | Sequence[float] = -1.0,
    high: float | Sequence[float] = 1.0,
    tolerance: float = CONSTRUCTION_TOL,
) -> VerificationReport:
    """
    (beta^c)^-1 (N_{-E}) = N_L, checked both ways on random samples. No
    regularity is assumed; for a regular L the N_L points are also checked
    against N_{-H} of the reduced Hamiltonian.
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    beta = tulczyjew.beta_c(sys.n)
    lag, energy = lagrangian_legendrian(sys), energy_legendrian(sys)

    _, lag_points = lag.sample(rng, samples, low, high)
    forward = [energy.residual(beta.apply(x)) for x in lag_points]
    _, energy_points = energy.sample(rng, samples, low, high)
    backward = [lag.residual(beta.inverse.apply(y)) for y in energy_points]
    details = {
        'forward': max(forward, default=0.0),
        'backward': max(backward, default=0.0),
        'regularity': sys.regularity.value,
    }
    residuals = forward + backward
    if sys.regularity is Regularity.REGULAR:
        ham = hamiltonian_legendrian(HamiltonianSystem(sys.n, reduced_hamiltonian(sys)))
        reduced = [ham.residual(x) for x in lag_points]
        details['reduced_hamiltonian'] = max(reduced, default=0.0)
        residuals += reduced
    return make_report(f'legendre_equivalence[{sys.L.label}]', residuals, tolerance, details)


# Submanifolds of the evolution triple. Slice points are (q, p, z, qdot, pdot, u).


def _slice_blocks(x: np.ndarray, n: int) -> tuple:
    if x.shape[0] == 4 * n + 3:
        base, p, qdot, pdot, zdot, u = _tangent_blocks(x, n)
        return base, p, qdot, pdot, zdot, u
    if x.shape[0] != 4 * n + 2:
        raise DimensionError(f'expected a slice point of dimension {4 * n + 2}, got {x.shape[0]}')
    o = 2 * n + 1
    p, qdot = x[n : 2 * n], x[o : o + n]
    return x[:o], p, qdot, x[o + n : o + 2 * n], p @ qdot, x[o + 2 * n]


def evolution_lagrangian_submanifold(sys: LagrangianSystem) -> SubmanifoldTest:
    """
    (alpha^0)^-1 (im dL) on the slice: residuals p - L_v,
    pdot - (L_z L_v + L_q), u + L_z and zdot - qdot.L_v. Accepts slice points
    and full TT*Q x R points; on the slice zdot is p.qdot.
    """
    n = sys.n

    def membership(x: np.ndarray) -> np.ndarray:
        base, p, qdot, pdot, zdot, u = _slice_blocks(x, n)
        _, grad = sys.L.value_and_gradient(_lagrangian_state(base[:n], qdot, base[2 * n]))
        l_q, l_v, l_z = grad[:n], grad[n : 2 * n], grad[2 * n]
        return np.concatenate([p - l_v, pdot - (l_z * l_v + l_q), [u + l_z, zdot - qdot @ l_v]])

    def parametrize(s: Sequence[float]) -> np.ndarray:
        s = as_vector(s, 2 * n + 1, 'Lagrangian state')
        grad = sys.L.gradient(s)
        l_q, l_v, l_z = grad[:n], grad[n : 2 * n], grad[2 * n]
        return np.concatenate([s[:n], l_v, [s[2 * n]], s[n : 2 * n], l_z * l_v + l_q, [-l_z]])

    return SubmanifoldTest(f'S[{sys.L.label}]', 4 * n + 2, membership, parametrize, 2 * n + 1)


def evolution_cotangent_image(sys: LagrangianSystem) -> SubmanifoldTest:
    """im(dL) in T*(TQ x R): (q, qdot, z, L_q, L_v, L_z)."""
    n = sys.n
    m = 2 * n + 1

    def membership(y: np.ndarray) -> np.ndarray:
        s, covector, _ = _split_ambient(y, m, classical=True)
        return covector - sys.L.gradient(s)

    def parametrize(s: Sequence[float]) -> np.ndarray:
        return np.concatenate([as_vector(s), sys.L.gradient(s)])

    return SubmanifoldTest(f'im(d{sys.L.label})', 2 * m, membership, parametrize, m)


def evolution_hamiltonian_lagrangian(sys: HamiltonianSystem) -> SubmanifoldTest:
    """im(epsilon_H, R(H)) on the slice: qdot = H_p, pdot = -H_q - p H_z, u = H_z."""
    n = sys.n

    def membership(x: np.ndarray) -> np.ndarray:
        base, _, qdot, pdot, _, u = _slice_blocks(x, n)
        velocity, conformal = contact_hamiltonian_field(sys, base)
        return np.concatenate([qdot - velocity[:n], pdot - velocity[n : 2 * n], [u - conformal]])

    def parametrize(base: Sequence[float]) -> np.ndarray:
        velocity, conformal = contact_hamiltonian_field(sys, base)
        return np.concatenate([as_vector(base), velocity[: 2 * n], [conformal]])

    return SubmanifoldTest(f'E[{sys.H.label}]', 4 * n + 2, membership, parametrize, 2 * n + 1)


def evolution_right_wing(sys: HamiltonianSystem) -> SubmanifoldTest:
    """im(-dH) in T*(T*Q x R), the image of im(epsilon_H, R(H)) under beta^0."""
    n = sys.n
    m = 2 * n + 1

    def membership(y: np.ndarray) -> np.ndarray:
        x, covector, _ = _split_ambient(y, m, classical=True)
        return covector + sys.H.gradient(x)

    def parametrize(base: Sequence[float]) -> np.ndarray:
        return np.concatenate([as_vector(base), -sys.H.gradient(base)])

    return SubmanifoldTest(f'im(-d{sys.H.label})', 2 * m, membership, parametrize, m)


def right_wing_report(
    sys: HamiltonianSystem,
    samples: int,
    rng: np.random.Generator | None = None,
    low: float | Sequence[float] = -1.0,
    high: float | Sequence[float] = 1.0,
    tolerance: float = CONSTRUCTION_TOL,
) -> VerificationReport:
    """beta^0 o (epsilon_H, R(H)) = -dH at random points."""
    rng = rng if rng is not None else np.random.default_rng(0)
    beta0 = tulczyjew.evolution_maps(sys.n)['beta0']
    source, target = evolution_hamiltonian_lagrangian(sys), evolution_right_wing(sys)
    _, points = source.sample(rng, samples, low, high)
    return make_report(
        f'right_wing[{sys.H.label}]', [target.residual(beta0.apply(x)) for x in points], tolerance
    )


# Tangency


def _tangents(test: SubmanifoldTest, params: np.ndarray) -> np.ndarray:
    return fd_jacobian(test.parametrize, params).T


def check_legendrian(
    test: SubmanifoldTest,
    form: tulczyjew.Form,
    samples: int,
    rng: np.random.Generator | None = None,
    low: float | Sequence[float] = -1.0,
    high: float | Sequence[float] = 1.0,
    expected_dim: int | None = None,
    tolerance: float = TANGENCY_TOL,
) -> VerificationReport:
    """
    Isotropy of a parametrized submanifold: the 1-form (or 2-form) vanishes on
    its finite-difference tangent vectors (pairs of them). With `expected_dim`
    the tangent rank is checked as well; a rank deficit fails the report.
    """
    if test.parametrize is None:
        raise ValueError(f'{test.name} has no parametrization')
    rng = rng if rng is not None else np.random.default_rng(0)
    residuals, ranks = [], []
    for params in rng.uniform(low, high, size=(samples, test.param_dim)):
        point = test.point(params)
        tangents = _tangents(test, params)
        ranks.append(int(np.linalg.matrix_rank(tangents, tol=1e-6)))
        scale = 1.0 + np.max(np.abs(tangents)) ** form.degree
        if form.degree == 1:
            values = [form(point, t) for t in tangents]
        else:
            values = [form(point, s, t) for i, s in enumerate(tangents) for t in tangents[i + 1 :]]
        residuals.append(max((abs(v) for v in values), default=0.0) / scale)
        if expected_dim is not None and ranks[-1] != expected_dim:
            residuals.append(float('inf'))
    details = {'form': form.name}
    if expected_dim is not None:
        details['expected_dim'] = expected_dim
        details['min_rank'] = min(ranks, default=expected_dim)
    return make_report(f'isotropic[{test.name}; {form.name}]', residuals, tolerance, details)


def trajectory_membership(
    test: SubmanifoldTest, rows: np.ndarray, name: str | None = None, tolerance: float = TRAJECTORY_TOL
) -> VerificationReport:
    """Residuals of lifted trajectory samples; the tolerance is integrator-limited."""
    return test.report(rows, tolerance, name or f'trajectory[{test.name}]')

