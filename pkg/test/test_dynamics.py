import math

import numpy as np
import pytest

from contact_mech.contact import contact_names, eta_eval
from contact_mech.dynamics import (
    ConvergenceError,
    HamiltonianSystem,
    LagrangianSystem,
    Regularity,
    SingularHessianError,
    Trajectory,
    conserved_I,
    contact_hamiltonian_field,
    contact_volume_rate,
    dissipation_residuals,
    evolution_field,
    evolution_rhs,
    fiber_derivative,
    hamiltonian_lift,
    hamiltonian_monitors,
    hamiltonian_rhs,
    herglotz_rhs,
    integrate,
    invariant_volume_rate,
    jacobi_bracket,
    lagrangian_contact_lift,
    lagrangian_monitors,
    lagrangian_names,
    lagrangian_rhs,
    legendre_dynamics_defects,
    monitor_dissipation,
    monitor_energy,
    reduced_hamiltonian,
)
from contact_mech.dual import DomainError
from contact_mech.numeric_diff import DimensionError, ScalarField


def hamiltonian(source, n=1, **constants):
    return HamiltonianSystem(n, ScalarField.from_expression(source, contact_names(n), constants, "H"))


def lagrangian(source, n=1, regularity=Regularity.UNKNOWN, **constants):
    return LagrangianSystem(n, ScalarField.from_expression(source, lagrangian_names(n), constants, "L"), regularity)


def damped():
    return lagrangian("0.5*qdot^2 - 0.5*q^2 - gamma*z", regularity=Regularity.REGULAR, gamma=0.1)


def test_names_and_arity():
    assert lagrangian_names(2) == ("q1", "q2", "qdot1", "qdot2", "z")
    with pytest.raises(DimensionError):
        HamiltonianSystem(2, ScalarField.from_expression("z", contact_names(1)))


def test_contact_hamiltonian_field_components():
    sys = hamiltonian("0.5*p^2 + 0.5*q^2 + gamma*z", gamma=0.1)
    velocity, conformal = contact_hamiltonian_field(sys, [1.0, 2.0, 3.0])
    H = 0.5 * 4 + 0.5 + 0.3
    assert velocity.tolist() == pytest.approx([2.0, -1.0 - 2.0 * 0.1, 2.0 * 2.0 - H])
    assert conformal == pytest.approx(0.1)


def test_defining_relations_of_the_contact_field(rng):
    # eta(X) = -H and i_X d eta = dH - R(H) eta
    sys = hamiltonian("0.5*(p1^2 + p2^2) + q1*q2 + z*p1", n=2)
    for x in rng.normal(size=(10, 5)):
        velocity, conformal = contact_hamiltonian_field(sys, x)
        value, grad = sys.H.value_and_gradient(x)
        assert eta_eval(x, velocity) == pytest.approx(-value)
        n = 2
        contraction = np.concatenate([-velocity[n : 2 * n], velocity[:n], [0.0]])
        eta = np.concatenate([-x[n : 2 * n], np.zeros(n), [1.0]])
        assert np.allclose(contraction, grad - conformal * eta)


def test_evolution_field_is_horizontal(rng):
    sys = hamiltonian("0.5*p^2 + q*z")
    for x in rng.normal(size=(10, 3)):
        assert eta_eval(x, evolution_field(sys, x)) == pytest.approx(0.0, abs=1e-12)


def test_jacobi_bracket_generates_the_field(rng):
    # X^c_H(F) = {F, H} - F R(H)
    sys = hamiltonian("0.5*p^2 + q^2*z")
    F = ScalarField.from_expression("q*p + z^2", contact_names(1))
    for x in rng.normal(size=(10, 3)):
        velocity, conformal = contact_hamiltonian_field(sys, x)
        lhs = F.gradient(x) @ velocity
        assert lhs == pytest.approx(jacobi_bracket(F, sys.H, x) - F.value(x) * conformal)


def test_jacobi_bracket_is_antisymmetric(rng):
    F = ScalarField.from_expression("q*p + z^2", contact_names(1))
    G = ScalarField.from_expression("exp(q) - p*z", contact_names(1))
    x = rng.normal(size=3)
    assert jacobi_bracket(F, G, x) == pytest.approx(-jacobi_bracket(G, F, x))


def test_decay_closed_form():
    # H = z: zdot = -z, so z(1) = exp(-1)
    sys = hamiltonian("z")
    traj = integrate(hamiltonian_rhs(sys), [0.0, 1.0, 1.0], (0.0, 1.0), 1e-3)
    assert len(traj) == 1001
    assert traj.times[-1] == 1.0
    assert traj.states[-1, 2] == pytest.approx(math.exp(-1.0), abs=1e-8)
    assert traj.states[-1, 1] == pytest.approx(math.exp(-1.0), abs=1e-8)


def test_last_step_lands_on_t1():
    traj = integrate(hamiltonian_rhs(hamiltonian("z")), [0.0, 0.0, 1.0], (0.0, 0.25), 0.1)
    assert traj.times.tolist() == pytest.approx([0.0, 0.1, 0.2, 0.25])


def test_integrate_rejects_bad_grid():
    rhs = hamiltonian_rhs(hamiltonian("z"))
    with pytest.raises(ValueError):
        integrate(rhs, [0.0, 0.0, 1.0], (0.0, 1.0), 0.0)
    with pytest.raises(ValueError):
        integrate(rhs, [0.0, 0.0, 1.0], (1.0, 1.0), 0.1)


def test_blow_up_is_flagged():
    # qdot = q^2 from q = 1 reaches infinity at t = 1
    sys = hamiltonian("q^2*p")
    traj = integrate(hamiltonian_rhs(sys), [1.0, 1.0, 0.0], (0.0, 10.0), 0.01)
    assert traj.blew_up
    assert traj.message
    assert traj.times[-1] < 10.0
    assert np.all(np.isfinite(traj.states))


def test_domain_error_stops_integration():
    # qdot = -1 drives q through zero at t = 0.5
    sys = hamiltonian("log(q) - p")
    traj = integrate(hamiltonian_rhs(sys), [0.5, 0.0, 0.0], (0.0, 2.0), 0.01)
    assert traj.blew_up
    assert "field evaluation failed" in traj.message


def test_dissipation_law_along_contact_flow():
    sys = hamiltonian("0.5*p^2 + 0.5*q^2 + gamma*z", gamma=0.1)
    monitors = hamiltonian_monitors(sys, ["H", "dissipation"])
    traj = integrate(hamiltonian_rhs(sys), [1.0, 0.0, 0.0], (0.0, 5.0), 1e-3, monitors)
    assert list(traj.diagnostics) == ["H", "dissipation"]
    report = monitor_dissipation(sys, traj)
    assert report.passed and report.samples == 5001
    # dH/dt = -R(H) H with R(H) = gamma: H(t) = H(0) exp(-gamma t)
    assert traj.diagnostics["H"][-1] == pytest.approx(0.5 * math.exp(-0.5), rel=1e-8)


def test_energy_conserved_for_z_independent_hamiltonian():
    sys = hamiltonian("0.5*p^2 + q")
    traj = integrate(hamiltonian_rhs(sys), [0.0, 1.0, 0.0], (0.0, 5.0), 1e-3)
    assert monitor_energy(sys, traj).passed


def test_energy_conserved_by_evolution_flow():
    sys = hamiltonian("0.5*p^2 + 0.5*q^2 + gamma*z", gamma=0.1)
    traj = integrate(evolution_rhs(sys), [1.0, 0.5, 0.2], (0.0, 5.0), 1e-3)
    assert monitor_energy(sys, traj, 1e-9).passed


def test_unknown_monitor():
    with pytest.raises(KeyError):
        hamiltonian_monitors(hamiltonian("z"), ["I"])


def test_herglotz_damped_oscillator():
    # q'' = -q - gamma q' for L = qdot^2/2 - q^2/2 - gamma z
    sys = damped()
    assert herglotz_rhs(sys, [1.0, 0.5, 0.0]).tolist() == pytest.approx([0.5, -1.0 - 0.05, 0.125 - 0.5])


def test_degenerate_lagrangian_has_no_herglotz_flow():
    sys = lagrangian("qdot", regularity=Regularity.DEGENERATE)
    with pytest.raises(SingularHessianError):
        herglotz_rhs(sys, [0.0, 1.0, 0.0])
    assert fiber_derivative(sys, [0.3, 1.0, 2.0]).tolist() == [0.3, 1.0, 2.0]


def test_conserved_quantity_of_herglotz_flow():
    sys = damped()
    monitors = lagrangian_monitors(sys, ["L", "I"])
    traj = integrate(lagrangian_rhs(sys), [1.0, 0.0, 0.0], (0.0, 5.0), 1e-3, monitors, kind="lagrangian")
    I = traj.diagnostics["I"]
    assert np.max(np.abs(I - I[0])) / (1 + abs(I[0])) < 1e-5
    assert np.array_equal(I, conserved_I(sys, traj))


def test_reduced_hamiltonian_of_damped_oscillator(rng):
    sys = damped()
    H = reduced_hamiltonian(sys)
    for x in rng.uniform(-1, 1, size=(10, 3)):
        q, p, z = x
        assert H.value(x) == pytest.approx(0.5 * p * p + 0.5 * q * q + 0.1 * z)
        assert H.gradient(x).tolist() == pytest.approx([q, p, 0.1])


def test_reduced_hamiltonian_needs_regular_lagrangian():
    H = reduced_hamiltonian(lagrangian("qdot"))
    with pytest.raises(SingularHessianError):
        H.value([0.0, 2.0, 0.0])


def test_reduced_hamiltonian_reports_divergence():
    # exp(qdot) = p has no solution for p < 0
    sys = lagrangian("exp(qdot)")
    with pytest.raises((ConvergenceError, SingularHessianError, DomainError)):
        reduced_hamiltonian(sys).value([0.0, -1.0, 0.0])


@pytest.mark.slow
@pytest.mark.parametrize("evolution", [False, True])
def test_lagrangian_trajectory_solves_hamiltons_equations(evolution):
    sys = damped()
    traj = integrate(lagrangian_rhs(sys, evolution), [1.0, 0.0, 0.0], (0.0, 5.0), 1e-3, kind="lagrangian")
    assert np.max(legendre_dynamics_defects(sys, traj, evolution)) < 1e-6
    lifted = lagrangian_contact_lift(sys, traj, evolution)
    assert lifted.shape == (len(traj), 7)


def test_hamiltonian_lift_rows():
    sys = hamiltonian("z")
    traj = integrate(hamiltonian_rhs(sys), [0.0, 1.0, 1.0], (0.0, 0.01), 1e-3)
    rows = hamiltonian_lift(sys, traj)
    assert rows.shape == (11, 7)
    assert rows[0].tolist() == [0.0, 1.0, 1.0, 0.0, -1.0, -1.0, 1.0]
    evolution_rows = hamiltonian_lift(sys, traj, evolution=True)
    assert evolution_rows[0, 5] == 0.0


def test_trajectory_validation():
    with pytest.raises(ValueError):
        Trajectory(np.array([0.0, 0.0]), np.zeros((2, 3)))
    with pytest.raises(ValueError):
        Trajectory(np.array([0.0]), np.zeros((2, 3)))
    traj = Trajectory(np.array([0.0]), np.zeros((1, 5)), kind="lagrangian")
    assert traj.n == 2
    assert traj.labels == ("q1", "q2", "qdot1", "qdot2", "z")


@pytest.mark.parametrize("source", ["0.5*p^2 + 0.5*q^2 + 0.3*z", "z*p + q^2", "0.5*p^2 - z^2"])
def test_volume_contracts_at_rate_n_plus_one_times_conformal_factor(source, rng):
    sys = hamiltonian(source)
    for x in rng.uniform(-1, 1, size=(5, 3)):
        rate, expected = contact_volume_rate(sys, x)
        assert rate == pytest.approx(expected, abs=1e-6)


def test_invariant_volume(rng):
    sys = hamiltonian("0.5*p^2 + 0.5*q^2 + 0.3*z + 2", n=1)
    for x in rng.uniform(-1, 1, size=(5, 3)):
        assert abs(invariant_volume_rate(sys, x)) < 1e-5
    with pytest.raises(DomainError):
        invariant_volume_rate(hamiltonian("z"), [0.0, 0.0, 0.0])


def test_dissipation_residuals_shape():
    sys = hamiltonian("z")
    traj = integrate(hamiltonian_rhs(sys), [0.0, 1.0, 1.0], (0.0, 0.1), 1e-2)
    assert dissipation_residuals(sys, traj).shape == (len(traj),)
