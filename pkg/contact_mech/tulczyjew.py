"""
Coordinate diffeomorphisms of the classical, contact and evolution Tulczyjew
triples, canonical forms on their targets, and a pullback verifier.

Every map is a closed-form function of a coordinate sequence and returns a
list, so the same code runs on floats and on `Dual` numbers. Slot orders follow
the table in `contact_mech.contact`; the classical spaces use (q, p, qdot, pdot)
on TT*Q, (q, qdot, a, adot) on T*TQ, (q, p, a, b) on T*T*Q and
(q, qdot, q', qdot') on TTQ.
"""

from dataclasses import dataclass
from typing import Any, Callable, Sequence

import numpy as np

from .contact import eta_T_eval, omega_eta_eval
from .dual import real
from .numeric_diff import DimensionError, as_vector, jacobian
from .verification import VerificationReport, make_report

CoordFn = Callable[[Sequence[Any]], list]


@dataclass(frozen=True)
class CoordMap:
    name: str
    dim_in: int
    dim_out: int
    forward: CoordFn
    inverse_fn: CoordFn | None = None

    def __call__(self, x: Sequence[Any]) -> list:
        if len(x) != self.dim_in:
            raise DimensionError(f'{self.name} takes {self.dim_in} coordinates, got {len(x)}')
        return list(self.forward(list(x)))

    def apply(self, x: Sequence[float]) -> np.ndarray:
        """Evaluates on floats and returns an array."""
        return np.array([real(v) for v in self(as_vector(x).tolist())])

    @property
    def inverse(self) -> 'CoordMap':
        if self.inverse_fn is None:
            raise ValueError(f'{self.name} has no closed-form inverse')
        return CoordMap(f'{self.name}^-1', self.dim_out, self.dim_in, self.inverse_fn, self.forward)


def compose(outer: CoordMap, inner: CoordMap) -> CoordMap:
    """outer o inner."""
    if inner.dim_out != outer.dim_in:
        raise DimensionError(f'cannot compose {outer.name} after {inner.name}: {inner.dim_out} != {outer.dim_in}')
    inverse = None
    if outer.inverse_fn is not None and inner.inverse_fn is not None:
        inverse = lambda y: inner.inverse_fn(outer.inverse_fn(y))  # noqa: E731
    return CoordMap(
        f'{outer.name}.{inner.name}',
        inner.dim_in,
        outer.dim_out,
        lambda x: outer.forward(inner.forward(x)),
        inverse,
    )


def identity(dim: int) -> CoordMap:
    return CoordMap('id', dim, dim, list, list)


def _blocks(x: list, n: int, pattern: str) -> list:
    """
    Splits `x` following `pattern`, one letter per block: 'v' is an n-vector,
    's' a scalar.
    """
    out, i = [], 0
    for kind in pattern:
        if kind == 'v':
            out.append(x[i : i + n])
            i += n
        else:
            out.append(x[i])
            i += 1
    if i != len(x):
        raise DimensionError(f'expected {i} coordinates, got {len(x)}')
    return out


def _dot(a: list, b: list) -> Any:
    return sum((ai * bi for ai, bi in zip(a, b)), 0.0)


def _neg(a: list) -> list:
    return [-v for v in a]


# Classical triple


def classical_maps(n: int) -> dict[str, CoordMap]:
    """alpha, beta, psi and kappa for an n-dimensional configuration space."""
    if n < 1:
        raise DimensionError(f'n must be >= 1, got {n}')
    d = 4 * n

    def alpha(x):
        q, p, qdot, pdot = _blocks(x, n, 'vvvv')
        return q + qdot + pdot + p

    def alpha_inv(y):
        q, qdot, a, adot = _blocks(y, n, 'vvvv')
        return q + adot + qdot + a

    def beta(x):
        q, p, qdot, pdot = _blocks(x, n, 'vvvv')
        return q + p + pdot + _neg(qdot)

    def beta_inv(y):
        q, p, a, b = _blocks(y, n, 'vvvv')
        return q + p + _neg(b) + a

    def psi(x):
        q, qdot, a, adot = _blocks(x, n, 'vvvv')
        return q + adot + a + _neg(qdot)

    def psi_inv(y):
        q, p, a, b = _blocks(y, n, 'vvvv')
        return q + _neg(b) + a + p

    def kappa(x):
        q, qdot, q2, qdot2 = _blocks(x, n, 'vvvv')
        return q + q2 + qdot + qdot2

    return {
        'alpha': CoordMap('alpha', d, d, alpha, alpha_inv),
        'beta': CoordMap('beta', d, d, beta, beta_inv),
        'psi': CoordMap('psi', d, d, psi, psi_inv),
        'kappa': CoordMap('kappa', d, d, kappa, kappa),
    }


# Contact triple


def beta_c(n: int) -> CoordMap:
    """(q, p, z, qdot, pdot, zdot, u) -> (q, p, z, u p + pdot, -qdot, -u, zdot - p.qdot)"""

    def forward(x):
        q, p, z, qdot, pdot, zdot, u = _blocks(x, n, 'vvsvvss')
        return q + p + [z] + [u * pi + pdi for pi, pdi in zip(p, pdot)] + _neg(qdot) + [-u, zdot - _dot(p, qdot)]

    def inverse(y):
        q, p, z, a, b, v, w = _blocks(y, n, 'vvsvvss')
        return q + p + [z] + _neg(b) + [ai + v * pi for ai, pi in zip(a, p)] + [w - _dot(p, b), -v]

    return CoordMap('beta_c', 4 * n + 3, 4 * n + 3, forward, inverse)


def alpha_c(n: int) -> CoordMap:
    """(q, p, z, qdot, pdot, zdot, u) -> (q, qdot, z, u p + pdot, p, -u, zdot)"""

    def forward(x):
        q, p, z, qdot, pdot, zdot, u = _blocks(x, n, 'vvsvvss')
        return q + qdot + [z] + [u * pi + pdi for pi, pdi in zip(p, pdot)] + p + [-u, zdot]

    def inverse(y):
        q, qdot, z, a, adot, v, w = _blocks(y, n, 'vvsvvss')
        return q + adot + [z] + qdot + [ai + v * adi for ai, adi in zip(a, adot)] + [w, -v]

    return CoordMap('alpha_c', 4 * n + 3, 4 * n + 3, forward, inverse)


def psi_c(n: int) -> CoordMap:
    """(q, qdot, z, a, adot, v, w) -> (q, adot, z, a, -qdot, v, w - adot.qdot)"""

    def forward(x):
        q, qdot, z, a, adot, v, w = _blocks(x, n, 'vvsvvss')
        return q + adot + [z] + a + _neg(qdot) + [v, w - _dot(adot, qdot)]

    def inverse(y):
        q, p, z, a, b, v, w = _blocks(y, n, 'vvsvvss')
        return q + _neg(b) + [z] + a + p + [v, w - _dot(p, b)]

    return CoordMap('psi_c', 4 * n + 3, 4 * n + 3, forward, inverse)


# Evolution triple, on the slice zdot = p.qdot


def evolution_maps(n: int) -> dict[str, CoordMap]:
    """alpha0 and beta0 from slice coordinates (q, p, z, qdot, pdot, u)."""

    def alpha0(x):
        q, p, z, qdot, pdot, u = _blocks(x, n, 'vvsvvs')
        return q + qdot + [z] + [u * pi + pdi for pi, pdi in zip(p, pdot)] + p + [-u]

    def alpha0_inv(y):
        q, qdot, z, a, adot, v = _blocks(y, n, 'vvsvvs')
        return q + adot + [z] + qdot + [ai + v * adi for ai, adi in zip(a, adot)] + [-v]

    def beta0(x):
        q, p, z, qdot, pdot, u = _blocks(x, n, 'vvsvvs')
        return q + p + [z] + [u * pi + pdi for pi, pdi in zip(p, pdot)] + _neg(qdot) + [-u]

    def beta0_inv(y):
        q, p, z, a, b, v = _blocks(y, n, 'vvsvvs')
        return q + p + [z] + _neg(b) + [ai + v * pi for ai, pi in zip(a, p)] + [-v]

    d = 4 * n + 2
    return {
        'alpha0': CoordMap('alpha0', d, d, alpha0, alpha0_inv),
        'beta0': CoordMap('beta0', d, d, beta0, beta0_inv),
    }


# Forms. Each evaluates at a point on one (1-forms) or two (2-forms) vectors.


@dataclass(frozen=True)
class Form:
    name: str
    degree: int
    evaluate: Callable[..., float]

    def __call__(self, point: Sequence[float], *vectors: Sequence[float]) -> float:
        if len(vectors) != self.degree:
            raise ValueError(f'{self.name} is a {self.degree}-form, got {len(vectors)} vectors')
        return self.evaluate(point, *vectors)


def canonical_eta_eval(point: Sequence[float], V: Sequence[float]) -> float:
    """
    dw - y.dx on T*M x R with coordinates (x, y, w), dim M = m. This is
    eta_{T*T*Q} = dw - a dq - b dp - v dz on T*(T*Q x R) x R, the form
    dw - a dq - adot dqdot - v dz on T*(TQ x R) x R, and the thermodynamic
    dU - T dS + P dV - mu dN on T*R^3 x R.
    """
    x, V = as_vector(point), as_vector(V)
    if x.shape != V.shape or x.shape[0] % 2 == 0:
        raise DimensionError(f'T*M x R point and vector must share an odd length, got {x.shape[0]}, {V.shape[0]}')
    m = (x.shape[0] - 1) // 2
    return float(V[2 * m] - x[m : 2 * m] @ V[:m])


def canonical_omega_eval(point: Sequence[float], V: Sequence[float], W: Sequence[float]) -> float:
    """sum dx^i ^ dy_i on T*M with coordinates (x, y)."""
    x, V, W = as_vector(point), as_vector(V), as_vector(W)
    if not x.shape == V.shape == W.shape or x.shape[0] % 2:
        raise DimensionError('T*M point and vectors must share an even length')
    m = x.shape[0] // 2
    return float(V[:m] @ W[m:] - V[m:] @ W[:m])


def tangent_omega_eval(point: Sequence[float], V: Sequence[float], W: Sequence[float]) -> float:
    """dq ^ dpdot + dqdot ^ dp on TT*Q with coordinates (q, p, qdot, pdot)."""
    x, V, W = as_vector(point), as_vector(V), as_vector(W)
    if not x.shape == V.shape == W.shape or x.shape[0] % 4:
        raise DimensionError('TT*Q point and vectors must share a length divisible by 4')
    n = x.shape[0] // 4
    q, p, qd, pd = slice(0, n), slice(n, 2 * n), slice(2 * n, 3 * n), slice(3 * n, 4 * n)
    return float(V[q] @ W[pd] - V[pd] @ W[q] + V[qd] @ W[p] - V[p] @ W[qd])


ETA_T = Form('eta_T', 1, eta_T_eval)
ETA_CANONICAL = Form('eta_canonical', 1, canonical_eta_eval)
OMEGA_ETA = Form('omega_eta', 2, lambda y, V, W: omega_eta_eval(y, V, W))
OMEGA_CANONICAL = Form('omega_canonical', 2, canonical_omega_eval)
OMEGA_TANGENT = Form('omega_tangent', 2, tangent_omega_eval)


def sample_points(rng: np.random.Generator, dim: int, samples: int, low: float = -2.0, high: float = 2.0) -> np.ndarray:
    return rng.uniform(low, high, size=(samples, dim))


def verify_pullback(
    m: CoordMap,
    src_form: Form,
    dst_form: Form,
    samples: int,
    conformal: Callable[[np.ndarray], float] | None = None,
    rng: np.random.Generator | None = None,
    tolerance: float = 1e-8,
    points: np.ndarray | None = None,
    name: str | None = None,
) -> VerificationReport:
    """
    Checks m* dst_form = conformal * src_form at random points: tangent vectors
    are pushed forward with the exact Jacobian of `m`. The residual is
    |dst - conformal * src| / (1 + |conformal * src|).
    """
    if src_form.degree != dst_form.degree:
        raise ValueError(f'cannot compare a {src_form.degree}-form with a {dst_form.degree}-form')
    rng = rng if rng is not None else np.random.default_rng(0)
    if points is None:
        points = sample_points(rng, m.dim_in, samples)
    elif points.shape[1] != m.dim_in:
        raise DimensionError(f'{m.name} takes {m.dim_in} coordinates, sample points have {points.shape[1]}')
    residuals = []
    for x in points[:samples]:
        jac = jacobian(m, x)
        y = m.apply(x)
        vectors = [rng.normal(size=m.dim_in) for _ in range(src_form.degree)]
        pushed = [jac @ v for v in vectors]
        factor = 1.0 if conformal is None else real(conformal(x))
        expected = factor * src_form(x, *vectors)
        actual = dst_form(y, *pushed)
        residuals.append(abs(actual - expected) / (1.0 + abs(expected)))
    return make_report(
        name or f'pullback[{m.name}]: {dst_form.name} -> {src_form.name}',
        residuals,
        tolerance,
    )


def roundtrip_report(
    m: CoordMap, samples: int, rng: np.random.Generator, tolerance: float = 1e-12
) -> VerificationReport:
    """forward.inverse and inverse.forward are the identity."""
    residuals = []
    for x in sample_points(rng, m.dim_in, samples):
        residuals.append(np.max(np.abs(m.inverse.apply(m.apply(x)) - x)) / (1.0 + np.max(np.abs(x))))
    for y in sample_points(rng, m.dim_out, samples):
        residuals.append(np.max(np.abs(m.apply(m.inverse.apply(y)) - y)) / (1.0 + np.max(np.abs(y))))
    return make_report(f'roundtrip[{m.name}]', residuals, tolerance)


def composition_report(
    name: str,
    lhs: CoordMap,
    rhs: CoordMap,
    samples: int,
    rng: np.random.Generator,
    tolerance: float = 1e-12,
) -> VerificationReport:
    """max |lhs(x) - rhs(x)| over random points."""
    if lhs.dim_in != rhs.dim_in:
        raise DimensionError(f'{lhs.name} and {rhs.name} have different domains')
    residuals = [np.max(np.abs(lhs.apply(x) - rhs.apply(x))) for x in sample_points(rng, lhs.dim_in, samples)]
    return make_report(name, residuals, tolerance)
