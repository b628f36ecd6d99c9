"""
The extended cotangent bundle T*Q x R in Darboux coordinates and its first
iterates.

Points, tangent vectors and covectors are flat float arrays. Slot order is
fixed for the whole package:

    space                 dim      slots
    T*Q x R               2n+1     q, p, z
    TT*Q x R              4n+3     q, p, z, qdot, pdot, zdot, u
    HT*Q x R (zdot=p.qdot) 4n+2    q, p, z, qdot, pdot, u
    T*(T*Q x R) x R       4n+3     q, p, z, a, b, v, w
    T*(TQ x R) x R        4n+3     q, qdot, z, a, adot, v, w
    T*(T*Q x R)           4n+2     q, p, z, a, b, v
    T*(TQ x R)            4n+2     q, qdot, z, a, adot, v

Vectors with q or p parts are laid out block-wise (all q's, then all p's).
The dataclasses below are views for readability; every operation also accepts
a raw array.
"""

import math
from dataclasses import dataclass
from typing import Any, Callable, Sequence

import numpy as np

from .numeric_diff import DEFAULT_FD_STEP, DimensionError, as_vector, fd_jacobian

CONSTRAINT_TOL = 1e-9


class ConstraintViolation(ValueError):
    """A point is off the constrained slice it was declared to lie on."""


def contact_names(n: int) -> tuple[str, ...]:
    """Coordinate names of T*Q x R: ('q', 'p', 'z') for n=1, ('q1', 'q2', 'p1', 'p2', 'z') for n=2."""
    if n < 1:
        raise DimensionError(f'configuration dimension must be >= 1, got {n}')
    if n == 1:
        return ('q', 'p', 'z')
    return tuple(f'q{i + 1}' for i in range(n)) + tuple(f'p{i + 1}' for i in range(n)) + ('z',)


def contact_dim(x: Sequence[float]) -> int:
    """n for a vector of length 2n+1."""
    m = len(x)
    if m < 3 or m % 2 == 0:
        raise DimensionError(f'T*Q x R vectors have odd length >= 3, got {m}')
    return (m - 1) // 2


def tangent_dim(x: Sequence[float]) -> int:
    """n for a vector of length 4n+3."""
    m = len(x)
    if m < 7 or (m - 3) % 4:
        raise DimensionError(f'expected a vector of length 4n+3, got {m}')
    return (m - 3) // 4


def slice_dim(x: Sequence[float]) -> int:
    """n for a vector of length 4n+2."""
    m = len(x)
    if m < 6 or (m - 2) % 4:
        raise DimensionError(f'expected a vector of length 4n+2, got {m}')
    return (m - 2) // 4


def _coords(x: Any) -> np.ndarray:
    return as_vector(getattr(x, 'vector', x))


@dataclass(frozen=True)
class ContactPoint:
    q: np.ndarray
    p: np.ndarray
    z: float

    def __post_init__(self):
        object.__setattr__(self, 'q', np.atleast_1d(np.asarray(self.q, dtype=float)))
        object.__setattr__(self, 'p', np.atleast_1d(np.asarray(self.p, dtype=float)))
        object.__setattr__(self, 'z', float(self.z))
        if self.q.shape != self.p.shape or self.q.shape[0] < 1:
            raise DimensionError(f'q and p must have equal length n >= 1, got {self.q.shape}, {self.p.shape}')

    @property
    def n(self) -> int:
        return self.q.shape[0]

    @property
    def vector(self) -> np.ndarray:
        return np.concatenate([self.q, self.p, [self.z]])

    @staticmethod
    def from_vector(x: Sequence[float]) -> 'ContactPoint':
        vec = as_vector(x)
        n = contact_dim(vec)
        return ContactPoint(vec[:n], vec[n : 2 * n], vec[2 * n])


@dataclass(frozen=True)
class ExtTangentPoint:
    base: ContactPoint
    qdot: np.ndarray
    pdot: np.ndarray
    zdot: float
    u: float

    def __post_init__(self):
        n = self.base.n
        for name in ('qdot', 'pdot'):
            arr = np.atleast_1d(np.asarray(getattr(self, name), dtype=float))
            if arr.shape != (n,):
                raise DimensionError(f'{name} must have length {n}, got {arr.shape}')
            object.__setattr__(self, name, arr)
        object.__setattr__(self, 'zdot', float(self.zdot))
        object.__setattr__(self, 'u', float(self.u))

    @property
    def vector(self) -> np.ndarray:
        return np.concatenate([self.base.vector, self.qdot, self.pdot, [self.zdot, self.u]])

    @staticmethod
    def from_vector(x: Sequence[float]) -> 'ExtTangentPoint':
        vec = as_vector(x)
        n = tangent_dim(vec)
        base = ContactPoint.from_vector(vec[: 2 * n + 1])
        o = 2 * n + 1
        return ExtTangentPoint(base, vec[o : o + n], vec[o + n : o + 2 * n], vec[o + 2 * n], vec[o + 2 * n + 1])


@dataclass(frozen=True)
class ExtCotangentPoint:
    """A point (q, p, z, a, b, v, w): a, b, v are conjugate to q, p, z; w is the extension fiber."""

    base: ContactPoint
    a: np.ndarray
    b: np.ndarray
    v: float
    w: float

    def __post_init__(self):
        n = self.base.n
        for name in ('a', 'b'):
            arr = np.atleast_1d(np.asarray(getattr(self, name), dtype=float))
            if arr.shape != (n,):
                raise DimensionError(f'{name} must have length {n}, got {arr.shape}')
            object.__setattr__(self, name, arr)
        object.__setattr__(self, 'v', float(self.v))
        object.__setattr__(self, 'w', float(self.w))

    @property
    def vector(self) -> np.ndarray:
        return np.concatenate([self.base.vector, self.a, self.b, [self.v, self.w]])

    @staticmethod
    def from_vector(x: Sequence[float]) -> 'ExtCotangentPoint':
        vec = as_vector(x)
        n = tangent_dim(vec)
        o = 2 * n + 1
        return ExtCotangentPoint(
            ContactPoint.from_vector(vec[:o]), vec[o : o + n], vec[o + n : o + 2 * n], vec[o + 2 * n], vec[o + 2 * n + 1]
        )


def _check_same(x: np.ndarray, v: np.ndarray, what: str) -> None:
    if x.shape != v.shape:
        raise DimensionError(f'{what}: point has dimension {x.shape[0]}, vector has {v.shape[0]}')


# T*Q x R


def eta_covector(x: Any) -> np.ndarray:
    """Components of eta = dz - p dq at x."""
    vec = _coords(x)
    n = contact_dim(vec)
    return np.concatenate([-vec[n : 2 * n], np.zeros(n), [1.0]])


def eta_eval(x: Any, V: Sequence[float]) -> float:
    vec, V = _coords(x), as_vector(V)
    _check_same(vec, V, 'eta')
    return float(eta_covector(vec) @ V)


def reeb(x: Any) -> np.ndarray:
    vec = _coords(x)
    contact_dim(vec)
    r = np.zeros(vec.shape[0])
    r[-1] = 1.0
    return r


def d_eta_eval(V: Sequence[float], W: Sequence[float]) -> float:
    """d eta = sum_i dq^i ^ dp_i on two tangent vectors."""
    V, W = as_vector(V), as_vector(W)
    n = contact_dim(V)
    _check_same(V, W, 'd eta')
    return float(V[:n] @ W[n : 2 * n] - V[n : 2 * n] @ W[:n])


def sharp_lambda(x: Any, alpha: Sequence[float]) -> np.ndarray:
    """
    The Jacobi bivector applied to a covector:
    alpha_i dq^i + alpha^i dp_i + u dz  ->  alpha^i d/dq^i - (alpha_i + p_i u) d/dp_i + alpha^i p_i d/dz
    """
    vec, alpha = _coords(x), as_vector(alpha)
    _check_same(vec, alpha, 'sharp')
    n = contact_dim(vec)
    p = vec[n : 2 * n]
    a_low, a_up, u = alpha[:n], alpha[n : 2 * n], alpha[2 * n]
    return np.concatenate([a_up, -(a_low + p * u), [a_up @ p]])


def flat(x: Any, V: Sequence[float]) -> np.ndarray:
    """v -> i_v d eta + eta(v) eta, as a covector."""
    vec, V = _coords(x), as_vector(V)
    _check_same(vec, V, 'flat')
    n = contact_dim(vec)
    contraction = np.concatenate([-V[n : 2 * n], V[:n], [0.0]])
    eta = eta_covector(vec)
    return contraction + (eta @ V) * eta


def horizontal_frame(x: Any) -> tuple[np.ndarray, np.ndarray]:
    """
    Frame of ker eta: rows of the first array are xi_i = d/dq^i + p_i d/dz, rows of
    the second are xi^i = d/dp_i.
    """
    vec = _coords(x)
    n = contact_dim(vec)
    lower = np.zeros((n, 2 * n + 1))
    upper = np.zeros((n, 2 * n + 1))
    for i in range(n):
        lower[i, i] = 1.0
        lower[i, 2 * n] = vec[n + i]
        upper[i, n + i] = 1.0
    return lower, upper


def lie_bracket(
    X: Callable[[np.ndarray], np.ndarray],
    Y: Callable[[np.ndarray], np.ndarray],
    x: Sequence[float],
    h: float = DEFAULT_FD_STEP,
) -> np.ndarray:
    """[X, Y] = DY.X - DX.Y with central-difference Jacobians."""
    vec = as_vector(x)
    return fd_jacobian(Y, vec, h) @ X(vec) - fd_jacobian(X, vec, h) @ Y(vec)


def volume_eval(vectors: np.ndarray) -> float:
    """
    d eta^n ^ eta on 2n+1 column vectors. In Darboux coordinates this is
    n! dq^1^dp_1^...^dq^n^dp_n^dz, which has constant coefficients.
    """
    vectors = np.asarray(vectors, dtype=float)
    m = vectors.shape[0]
    n = (m - 1) // 2
    order = [k for i in range(n) for k in (i, n + i)] + [2 * n]
    return float(math.factorial(n) * np.linalg.det(vectors[order, :]))


def volume_lie_derivative(
    field: Callable[[np.ndarray], np.ndarray], x: Sequence[float], h: float = DEFAULT_FD_STEP
) -> float:
    """
    (L_X vol)(e_1, ..., e_m) on the coordinate basis. The coefficient is
    constant, so only the terms vol(e_1, .., dX(e_i), .., e_m) remain, with dX from
    central differences.
    """
    vec = as_vector(x)
    jac = fd_jacobian(field, vec, h)
    total = 0.0
    for i in range(vec.shape[0]):
        basis = np.eye(vec.shape[0])
        basis[:, i] = jac[:, i]
        total += volume_eval(basis)
    return total


def exterior_derivative(
    one_form: Callable[[np.ndarray], np.ndarray], x: Sequence[float], h: float = DEFAULT_FD_STEP
) -> np.ndarray:
    """Matrix of d(theta) at x: entry (a, b) is d_a theta_b - d_b theta_a."""
    jac = fd_jacobian(one_form, as_vector(x), h)
    return jac.T - jac


# TT*Q x R


def eta_T_covector(X: Any) -> np.ndarray:
    """eta^T = d zdot + u dz - (pdot + u p) dq - p dqdot."""
    vec = _coords(X)
    n = tangent_dim(vec)
    p = vec[n : 2 * n]
    pdot = vec[3 * n + 1 : 4 * n + 1]
    u = vec[4 * n + 2]
    return np.concatenate([-(pdot + u * p), np.zeros(n), [u], -p, np.zeros(n), [1.0, 0.0]])


def eta_T_eval(X: Any, W: Sequence[float]) -> float:
    vec, W = _coords(X), as_vector(W)
    _check_same(vec, W, 'eta^T')
    return float(eta_T_covector(vec) @ W)


def reeb_T(X: Any) -> np.ndarray:
    vec = _coords(X)
    n = tangent_dim(vec)
    r = np.zeros(vec.shape[0])
    r[4 * n + 1] = 1.0
    return r


# HT*Q x R, the slice zdot = p.qdot


def to_slice(X: Any, tol: float = CONSTRAINT_TOL) -> np.ndarray:
    """Drops the zdot slot of a point of TT*Q x R lying on zdot = p.qdot."""
    vec = _coords(X)
    n = tangent_dim(vec)
    p, qdot, zdot = vec[n : 2 * n], vec[2 * n + 1 : 3 * n + 1], vec[4 * n + 1]
    defect = zdot - p @ qdot
    if abs(defect) > tol:
        raise ConstraintViolation(f'zdot - p.qdot = {defect:.3e} exceeds {tol:g}')
    return np.delete(vec, 4 * n + 1)


def from_slice(y: Sequence[float]) -> np.ndarray:
    """Inserts zdot = p.qdot into a point of HT*Q x R."""
    vec = as_vector(y)
    n = slice_dim(vec)
    zdot = vec[n : 2 * n] @ vec[2 * n + 1 : 3 * n + 1]
    return np.insert(vec, 4 * n + 1, zdot)


def _slice_point(X: Any, tol: float) -> np.ndarray:
    vec = _coords(X)
    if (vec.shape[0] - 3) % 4 == 0:
        return to_slice(vec, tol)
    slice_dim(vec)
    return vec


def theta_eta_covector(y: Sequence[float]) -> np.ndarray:
    """theta_eta = u dz - (pdot + u p) dq + qdot dp on slice coordinates."""
    vec = as_vector(y)
    n = slice_dim(vec)
    p, qdot, pdot, u = vec[n : 2 * n], vec[2 * n + 1 : 3 * n + 1], vec[3 * n + 1 : 4 * n + 1], vec[4 * n + 1]
    return np.concatenate([-(pdot + u * p), qdot, [u], np.zeros(2 * n + 1)])


def theta_prime_covector(y: Sequence[float]) -> np.ndarray:
    """u dz - (pdot + u p) dq - p dqdot; differs from theta_eta by d(p.qdot)."""
    vec = as_vector(y)
    n = slice_dim(vec)
    p, pdot, u = vec[n : 2 * n], vec[3 * n + 1 : 4 * n + 1], vec[4 * n + 1]
    return np.concatenate([-(pdot + u * p), np.zeros(n), [u], -p, np.zeros(n + 1)])


def theta_eta_eval(X: Any, W: Sequence[float], tol: float = CONSTRAINT_TOL) -> float:
    y, W = _slice_point(X, tol), as_vector(W)
    _check_same(y, W, 'theta_eta')
    return float(theta_eta_covector(y) @ W)


def theta_prime_eval(X: Any, W: Sequence[float], tol: float = CONSTRAINT_TOL) -> float:
    y, W = _slice_point(X, tol), as_vector(W)
    _check_same(y, W, 'theta_prime')
    return float(theta_prime_covector(y) @ W)


def _add_wedge(omega: np.ndarray, a: int, b: int, coefficient: float) -> None:
    omega[a, b] += coefficient
    omega[b, a] -= coefficient


def omega_eta_matrix(X: Any, tol: float = CONSTRAINT_TOL) -> np.ndarray:
    """
    omega_eta = du^dz - dpdot^dq - p du^dq - u dp^dq + dqdot^dp as an
    antisymmetric matrix on slice coordinates, so omega(V, W) = V^T M W.
    """
    y = _slice_point(X, tol)
    n = slice_dim(y)
    p, u = y[n : 2 * n], y[4 * n + 1]
    iq, ip, iz, iqd, ipd, iu = 0, n, 2 * n, 2 * n + 1, 3 * n + 1, 4 * n + 1
    omega = np.zeros((4 * n + 2, 4 * n + 2))
    _add_wedge(omega, iu, iz, 1.0)
    for i in range(n):
        _add_wedge(omega, ipd + i, iq + i, -1.0)
        _add_wedge(omega, iu, iq + i, -p[i])
        _add_wedge(omega, ip + i, iq + i, -u)
        _add_wedge(omega, iqd + i, ip + i, 1.0)
    return omega


def omega_eta_eval(X: Any, W1: Sequence[float], W2: Sequence[float], tol: float = CONSTRAINT_TOL) -> float:
    omega = omega_eta_matrix(X, tol)
    W1, W2 = as_vector(W1, omega.shape[0], 'W1'), as_vector(W2, omega.shape[0], 'W2')
    return float(W1 @ omega @ W2)
