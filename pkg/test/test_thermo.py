import math

import numpy as np
import pytest

from contact_mech.dual import DomainError
from contact_mech.dynamics import contact_hamiltonian_field, evolution_field
from contact_mech.legendrian import critical_fiber, morse_rank_check
from contact_mech.thermo import (
    GasConstants,
    GasState,
    InvalidPartitionError,
    gas_field_formula,
    gas_field_reports,
    gas_flow,
    gas_hamiltonian,
    gas_lagrangian_reports,
    gas_legendrian,
    gas_quantomorphisms,
    gas_residuals,
    gas_state_from_base,
    generator_transport,
    gibbs_passage,
    legendre_consistency,
    potentials,
    quantomorphism,
    quantomorphism_reports,
    sample_base,
    w_family,
)
from contact_mech.tulczyjew import ETA_CANONICAL, verify_pullback

X0 = [2.0, 1.0, 1.0, 3.0, -1.0, 4.0, 5.0]


@pytest.fixture
def k():
    return GasConstants()


@pytest.mark.parametrize("field", ["U0", "c", "R"])
@pytest.mark.parametrize("value", [0.0, -1.0, math.nan, math.inf, "1"])
def test_constants_must_be_positive(field, value):
    with pytest.raises(ValueError, match=field):
        GasConstants(**{field: value})


def test_c_bar():
    assert GasConstants(c=1.0).c_bar == pytest.approx(2.0)


def test_gas_state():
    st = GasState(S=1.0, V=2.0, N=1.0, T=3.0, P=4.0, mu=0.5, U=6.0)
    assert st.vector.tolist() == [1.0, 2.0, 1.0, 3.0, -4.0, 0.5, 6.0]
    assert GasState.from_vector(st.vector) == st
    with pytest.raises(DomainError):
        GasState(S=1.0, V=0.0, N=1.0, T=1.0, P=1.0, mu=0.0, U=1.0)


def test_internal_energy_at_reference_point(k):
    assert potentials(k)["U"].value([0.0, 1.0, 1.0]) == pytest.approx(k.U0)


def test_equilibrium_states_satisfy_gas_laws(k, rng):
    for S, V, N in sample_base(rng, 20):
        st = gas_state_from_base(k, S, V, N)
        assert st.P * st.V == pytest.approx(st.N * k.R * st.T)
        assert np.max(np.abs(gas_residuals(k, st.vector))) < 1e-12


def test_gas_residuals_domain(k):
    with pytest.raises(DomainError):
        gas_residuals(k, [0.0, -1.0, 1.0, 1.0, -1.0, 0.0, 1.0])


def test_gas_legendrian_is_isotropic(k, rng):
    from contact_mech.legendrian import check_legendrian

    gas = gas_legendrian(k)
    assert gas.contains(gas.point([0.5, 1.0, 1.0]))
    report = check_legendrian(gas, ETA_CANONICAL, 10, rng, (-1.0, 0.5, 0.5), (2.0, 2.0, 2.0), expected_dim=3)
    assert report.passed


def test_legendre_consistency(k, rng):
    reports = legendre_consistency(k, 20, rng)
    assert [r.name for r in reports] == [f"legendre_consistency[{p}]" for p in "BFGW"]
    assert all(r.passed for r in reports)


def test_w_undefined_where_mole_number_is(k):
    # (c+1) R T - mu = 0
    with pytest.raises(DomainError, match="mole number"):
        potentials(k)["W"].value([1.0, 1.0, 2.5, 1.0])


def test_w_family_vanishes_on_equilibrium(k):
    st = gas_state_from_base(k, 0.7, 1.2, 0.9)
    fam = w_family(k)
    base = [st.T, -st.P, st.mu]
    assert morse_rank_check(fam, base + [st.S]).ok
    # dW/dS = (G_N - mu) dN/dS, which vanishes for every S once mu is the equilibrium value
    for S in (st.S, st.S + 0.3):
        value, grad = fam.E.value_and_gradient(base + [S])
        assert abs(grad[3]) < 1e-9
    assert abs(fam.E.value(base + [st.S])) < 1e-9
    assert critical_fiber(fam, base, seed=[st.S]).tolist() == [st.S]


def test_w_family_slope_is_independent_of_entropy(k):
    st = gas_state_from_base(k, 0.7, 1.2, 0.9)
    base = [st.T, -st.P, st.mu - 0.2]
    fam = w_family(k)
    slopes = [fam.E.gradient(base + [S])[3] for S in (st.S, st.S + 0.3, 2.0 * st.S)]
    assert abs(slopes[0]) > 1e-3
    assert slopes[1:] == pytest.approx([slopes[0]] * 2, rel=1e-9)
    # W is the entropy times that slope
    assert fam.E.value(base + [st.S]) == pytest.approx(st.S * slopes[0], rel=1e-9)


def test_quantomorphism_example():
    phi = quantomorphism([0], m=1)
    assert phi.apply([1.0, 2.0, 5.0]).tolist() == [2.0, -1.0, 3.0]
    assert phi.inverse.apply([2.0, -1.0, 3.0]).tolist() == [1.0, 2.0, 5.0]


@pytest.mark.parametrize(
    "swapped, kwargs",
    [([0, 0], {}), ([3], {}), ([-1], {}), ([0], {"kept": [1]}), ([0], {"kept": [0, 1, 2]}), ([], {"m": 0})],
)
def test_quantomorphism_partition_errors(swapped, kwargs):
    with pytest.raises(InvalidPartitionError):
        quantomorphism(swapped, **kwargs)


@pytest.mark.parametrize("swapped", [[], [0], [1, 2], [0, 1, 2]])
def test_quantomorphisms_are_strict(swapped, rng):
    phi = quantomorphism(swapped, kept=[i for i in range(3) if i not in swapped])
    assert verify_pullback(phi, ETA_CANONICAL, ETA_CANONICAL, 20, rng=rng).passed


def test_gibbs_passage():
    assert gibbs_passage(X0).tolist() == [3.0, -1.0, 1.0, -2.0, -1.0, 4.0, 0.0]
    chain = gas_quantomorphisms()["phi3.phi2"]
    assert chain.apply(X0).tolist() == pytest.approx(gibbs_passage(X0).tolist())


def test_quantomorphism_reports(rng):
    reports = quantomorphism_reports(10, rng)
    assert len(reports) == 7
    assert all(r.passed for r in reports)


@pytest.mark.parametrize("which", ["B", "F", "G", "W"])
def test_generator_transport(which, k, rng):
    report = generator_transport(k, which, 10, rng)
    assert report.passed, report


def test_generator_transport_unknown(k):
    with pytest.raises(ValueError):
        generator_transport(k, "H", 1)


def test_gas_field_example(k):
    sys = gas_hamiltonian(k)
    velocity, conformal = contact_hamiltonian_field(sys, X0)
    assert velocity.tolist() == pytest.approx([1.0, 0.0, 1.0, 0.0, -1.0, 3.0, 5.0])
    assert conformal == -1.0
    assert evolution_field(sys, X0)[6] == pytest.approx(7.0)
    assert gas_field_formula(k, X0, evolution=True)[6] == 7.0


def test_gas_field_reports(k, rng):
    assert all(r.passed for r in gas_field_reports(k, 20, rng))


@pytest.mark.parametrize("evolution", [False, True])
def test_gas_flow(evolution, k):
    traj, reports = gas_flow(k, X0, (0.0, 0.5), 1e-3, evolution)
    assert not traj.blew_up
    assert len(traj) == 501
    failed = [r.name for r in reports if not r.passed]
    assert not failed
    # N grows like exp(t) under both flows
    assert traj.states[-1, 2] == pytest.approx(math.exp(0.5), rel=1e-9)


def test_gas_lagrangian(k, rng):
    fam, reports = gas_lagrangian_reports(k, 10, rng)
    assert fam.n_base == 7 and fam.n_fiber == 3
    assert [r.passed for r in reports] == [True] * 4
