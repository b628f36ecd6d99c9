import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from contact_mech.contact import (
    ConstraintViolation,
    ContactPoint,
    ExtCotangentPoint,
    ExtTangentPoint,
    contact_dim,
    contact_names,
    d_eta_eval,
    eta_eval,
    eta_T_eval,
    exterior_derivative,
    flat,
    from_slice,
    horizontal_frame,
    lie_bracket,
    omega_eta_eval,
    omega_eta_matrix,
    reeb,
    reeb_T,
    sharp_lambda,
    slice_dim,
    tangent_dim,
    theta_eta_covector,
    theta_prime_covector,
    to_slice,
    volume_eval,
)
from contact_mech.numeric_diff import DimensionError


def test_names():
    assert contact_names(1) == ("q", "p", "z")
    assert contact_names(2) == ("q1", "q2", "p1", "p2", "z")
    with pytest.raises(DimensionError):
        contact_names(0)


def test_dimensions():
    assert contact_dim([0] * 5) == 2
    assert tangent_dim([0] * 11) == 2
    assert slice_dim([0] * 10) == 2
    with pytest.raises(DimensionError):
        contact_dim([0] * 4)
    with pytest.raises(DimensionError):
        tangent_dim([0] * 8)


def test_point_views_round_trip():
    x = ContactPoint([1.0, 2.0], [3.0, 4.0], 5.0)
    assert x.n == 2
    assert ContactPoint.from_vector(x.vector).vector.tolist() == [1.0, 2.0, 3.0, 4.0, 5.0]
    X = ExtTangentPoint.from_vector(np.arange(7.0))
    assert X.base.vector.tolist() == [0.0, 1.0, 2.0]
    assert (X.qdot.tolist(), X.pdot.tolist(), X.zdot, X.u) == ([3.0], [4.0], 5.0, 6.0)
    Y = ExtCotangentPoint.from_vector(np.arange(7.0))
    assert Y.vector.tolist() == list(np.arange(7.0))
    with pytest.raises(DimensionError):
        ContactPoint([1.0], [1.0, 2.0], 0.0)


def test_fiber_lengths_match_base():
    base = ContactPoint([1.0, 2.0], [3.0, 4.0], 5.0)
    Y = ExtCotangentPoint(base, [1.0, 1.0], [2.0, 2.0], 3, 4)
    assert Y.a.tolist() == [1.0, 1.0]
    assert (Y.v, Y.w) == (3.0, 4.0)
    with pytest.raises(DimensionError, match="a must have length 2"):
        ExtCotangentPoint(base, [1.0], [2.0, 2.0], 3.0, 4.0)
    with pytest.raises(DimensionError, match="b must have length 2"):
        ExtCotangentPoint(base, [1.0, 1.0], [2.0, 2.0, 2.0], 3.0, 4.0)
    with pytest.raises(DimensionError, match="qdot must have length 2"):
        ExtTangentPoint(base, [1.0], [2.0, 2.0], 3.0, 4.0)


def test_eta_and_reeb():
    x = [1.0, 2.0, 3.0]
    assert eta_eval(x, [1.0, 0.0, 0.0]) == -2.0
    assert eta_eval(x, reeb(x)) == 1.0
    assert eta_eval(ContactPoint(1.0, 2.0, 3.0), [0.0, 0.0, 1.0]) == 1.0
    with pytest.raises(DimensionError):
        eta_eval(x, [1.0, 0.0])


def test_reeb_is_in_kernel_of_d_eta(rng):
    x = rng.normal(size=5)
    for W in rng.normal(size=(4, 5)):
        assert d_eta_eval(reeb(x), W) == 0.0


def test_horizontal_frame_spans_kernel_of_eta():
    x = np.array([0.3, -1.0, 2.0, 0.5, 7.0])
    lower, upper = horizontal_frame(x)
    for xi in [*lower, *upper]:
        assert eta_eval(x, xi) == pytest.approx(0.0)
    assert np.linalg.matrix_rank(np.vstack([lower, upper])) == 4


def test_frame_brackets_are_reeb():
    # [xi^i, xi_j] = delta^i_j R
    x = np.array([0.3, -1.0, 2.0, 0.5, 7.0])
    n = 2

    def lower(j):
        return lambda y: horizontal_frame(y)[0][j]

    def upper(i):
        return lambda y: horizontal_frame(y)[1][i]

    for i in range(n):
        for j in range(n):
            bracket = lie_bracket(upper(i), lower(j), x)
            expected = reeb(x) if i == j else np.zeros(5)
            assert np.allclose(bracket, expected, atol=1e-8)


def test_sharp_and_flat():
    x = np.array([1.0, 2.0, 3.0])
    # flat is an isomorphism and sends the Reeb field to eta
    assert np.allclose(flat(x, reeb(x)), [-2.0, 0.0, 1.0])
    assert sharp_lambda(x, [1.0, 2.0, 3.0]).tolist() == [2.0, -(1.0 + 2.0 * 3.0), 4.0]


def test_volume_form():
    assert volume_eval(np.eye(3)) == 1.0
    # n! on (d/dq1, d/dp1, d/dq2, d/dp2, d/dz), sign of the reordering on the coordinate basis
    assert volume_eval(np.eye(5)[:, [0, 2, 1, 3, 4]]) == pytest.approx(2.0)
    assert volume_eval(np.eye(5)) == pytest.approx(-2.0)


def test_eta_T():
    X = np.arange(1.0, 8.0)  # q=1 p=2 z=3 qdot=4 pdot=5 zdot=6 u=7
    # eta^T = d zdot + u dz - (pdot + u p) dq - p dqdot
    assert eta_T_eval(X, [1, 0, 0, 0, 0, 0, 0]) == -(5.0 + 7.0 * 2.0)
    assert eta_T_eval(X, [0, 0, 1, 0, 0, 0, 0]) == 7.0
    assert eta_T_eval(X, [0, 0, 0, 1, 0, 0, 0]) == -2.0
    assert eta_T_eval(X, reeb_T(X)) == 1.0


def test_slice():
    X = np.array([1.0, 2.0, 3.0, 4.0, 5.0, 8.0, 7.0])  # zdot = p.qdot = 8
    y = to_slice(X)
    assert y.tolist() == [1.0, 2.0, 3.0, 4.0, 5.0, 7.0]
    assert from_slice(y).tolist() == X.tolist()
    with pytest.raises(ConstraintViolation):
        to_slice(np.arange(1.0, 8.0))


def test_theta_forms_differ_by_exact_form():
    y = np.array([0.4, -1.2, 0.7, 2.0, 0.3, -0.5])
    p, qdot = y[1], y[3]
    diff = theta_eta_covector(y) - theta_prime_covector(y)
    # d(p.qdot) = qdot dp + p dqdot
    expected = np.zeros(6)
    expected[1], expected[3] = qdot, p
    assert np.allclose(diff, expected)


@settings(max_examples=20, deadline=None)
@given(st.lists(st.floats(min_value=-2, max_value=2), min_size=6, max_size=6))
def test_omega_eta_is_d_theta(y):
    y = np.array(y)
    assert np.allclose(exterior_derivative(theta_eta_covector, y), omega_eta_matrix(y), atol=1e-7)
    assert np.allclose(exterior_derivative(theta_prime_covector, y), omega_eta_matrix(y), atol=1e-7)


def test_omega_eta_accepts_full_points_on_the_slice(rng):
    y = rng.normal(size=6)
    V, W = rng.normal(size=(2, 6))
    assert omega_eta_eval(from_slice(y), V, W) == pytest.approx(omega_eta_eval(y, V, W))
    assert omega_eta_eval(y, V, W) == pytest.approx(-omega_eta_eval(y, W, V))
    with pytest.raises(ConstraintViolation):
        omega_eta_eval(np.arange(1.0, 8.0), V, W)


def test_omega_eta_is_nondegenerate(rng):
    for n in (1, 2):
        y = rng.normal(size=4 * n + 2)
        assert abs(np.linalg.det(omega_eta_matrix(y))) > 1e-8
