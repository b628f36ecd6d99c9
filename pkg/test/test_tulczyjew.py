import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from contact_mech.numeric_diff import DimensionError
from contact_mech.tulczyjew import (
    ETA_CANONICAL,
    ETA_T,
    OMEGA_CANONICAL,
    OMEGA_ETA,
    OMEGA_TANGENT,
    CoordMap,
    alpha_c,
    beta_c,
    canonical_eta_eval,
    canonical_omega_eval,
    classical_maps,
    composition_report,
    compose,
    evolution_maps,
    identity,
    psi_c,
    roundtrip_report,
    tangent_omega_eval,
    verify_pullback,
)

SEVEN = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0]


def test_beta_c_example():
    assert beta_c(1).apply(SEVEN).tolist() == [1.0, 2.0, 3.0, 19.0, -4.0, -7.0, -2.0]


def test_alpha_c_example():
    assert alpha_c(1).apply(SEVEN).tolist() == [1.0, 4.0, 3.0, 19.0, 2.0, -7.0, 6.0]


def test_psi_c_example():
    assert psi_c(1).apply(SEVEN).tolist() == [1.0, 5.0, 3.0, 4.0, -2.0, 6.0, -3.0]


def test_classical_examples():
    maps = classical_maps(1)
    assert maps["alpha"].apply([1, 2, 3, 4]).tolist() == [1.0, 3.0, 4.0, 2.0]
    assert maps["beta"].apply([1, 2, 3, 4]).tolist() == [1.0, 2.0, 4.0, -3.0]
    assert maps["psi"].apply([1, 2, 3, 4]).tolist() == [1.0, 4.0, 3.0, -2.0]
    assert maps["kappa"].apply([1, 2, 3, 4]).tolist() == [1.0, 3.0, 2.0, 4.0]


def test_evolution_examples():
    maps = evolution_maps(1)
    x = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0]
    assert maps["alpha0"].apply(x).tolist() == [1.0, 4.0, 3.0, 17.0, 2.0, -6.0]
    assert maps["beta0"].apply(x).tolist() == [1.0, 2.0, 3.0, 17.0, -4.0, -6.0]


@pytest.mark.parametrize("n", [1, 2])
def test_contact_pullbacks(n, rng):
    assert verify_pullback(beta_c(n), ETA_T, ETA_CANONICAL, 50, rng=rng).passed
    assert verify_pullback(alpha_c(n), ETA_T, ETA_CANONICAL, 50, rng=rng).passed
    assert verify_pullback(psi_c(n), ETA_CANONICAL, ETA_CANONICAL, 50, rng=rng).passed


@pytest.mark.parametrize("n", [1, 2])
def test_classical_pullbacks(n, rng):
    maps = classical_maps(n)
    assert verify_pullback(maps["alpha"], OMEGA_TANGENT, OMEGA_CANONICAL, 50, rng=rng).passed
    assert verify_pullback(maps["beta"], OMEGA_TANGENT, OMEGA_CANONICAL, 50, rng=rng).passed
    assert verify_pullback(maps["psi"], OMEGA_CANONICAL, OMEGA_CANONICAL, 50, rng=rng).passed


@pytest.mark.parametrize("n", [1, 2])
def test_evolution_pullbacks(n, rng):
    maps = evolution_maps(n)
    assert verify_pullback(maps["alpha0"], OMEGA_ETA, OMEGA_CANONICAL, 50, rng=rng).passed
    assert verify_pullback(maps["beta0"], OMEGA_ETA, OMEGA_CANONICAL, 50, rng=rng).passed


def test_pullback_detects_wrong_form(rng):
    report = verify_pullback(psi_c(1), ETA_T, ETA_CANONICAL, 20, rng=rng)
    assert not report.passed
    assert report.samples == 20


def test_pullback_with_conformal_factor(rng):
    doubling = CoordMap("double", 2, 2, lambda x: [2 * v for v in x], lambda y: [v / 2 for v in y])
    assert not verify_pullback(doubling, OMEGA_CANONICAL, OMEGA_CANONICAL, 10, rng=rng).passed
    assert verify_pullback(doubling, OMEGA_CANONICAL, OMEGA_CANONICAL, 10, conformal=lambda x: 4.0, rng=rng).passed


def test_pullback_with_zero_samples_is_vacuous(rng):
    report = verify_pullback(beta_c(1), ETA_T, ETA_CANONICAL, 0, rng=rng)
    assert report.passed and report.vacuous


def test_pullback_degree_mismatch():
    with pytest.raises(ValueError):
        verify_pullback(beta_c(1), ETA_T, OMEGA_CANONICAL, 5)


def test_pullback_on_given_points(rng):
    with pytest.raises(DimensionError):
        verify_pullback(beta_c(1), ETA_T, ETA_CANONICAL, 5, points=np.zeros((5, 6)))
    report = verify_pullback(beta_c(1), ETA_T, ETA_CANONICAL, 3, rng=rng, points=rng.normal(size=(5, 7)))
    assert report.samples == 3


@pytest.mark.parametrize("n", [1, 2])
def test_compositions(n, rng):
    classical = classical_maps(n)
    assert composition_report("beta_c", beta_c(n), compose(psi_c(n), alpha_c(n)), 30, rng).passed
    psi = compose(classical["beta"], classical["alpha"].inverse)
    assert composition_report("psi", classical["psi"], psi, 30, rng).passed
    kappa2 = compose(classical["kappa"], classical["kappa"])
    assert composition_report("kappa", kappa2, identity(4 * n), 30, rng).passed


@pytest.mark.parametrize("n", [1, 2])
def test_roundtrips(n, rng):
    maps = [beta_c(n), alpha_c(n), psi_c(n), *classical_maps(n).values(), *evolution_maps(n).values()]
    for m in maps:
        report = roundtrip_report(m, 20, rng)
        assert report.passed, m.name
        assert report.samples == 40


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-1e3, 1e3), min_size=7, max_size=7))
def test_beta_c_inverse(x):
    m = beta_c(1)
    assert np.allclose(m.inverse.apply(m.apply(x)), x, rtol=1e-12, atol=1e-9)


def test_composed_inverse():
    m = compose(psi_c(1), alpha_c(1))
    assert np.allclose(m.inverse.apply(m.apply(SEVEN)), SEVEN)
    assert m.name == "psi_c.alpha_c"


def test_missing_inverse():
    m = CoordMap("square", 1, 1, lambda x: [x[0] * x[0]])
    with pytest.raises(ValueError, match="no closed-form inverse"):
        m.inverse
    with pytest.raises(ValueError):
        compose(m, identity(1)).inverse


def test_dimension_errors():
    with pytest.raises(DimensionError):
        beta_c(1)([1.0, 2.0])
    with pytest.raises(DimensionError):
        compose(beta_c(1), psi_c(2))
    with pytest.raises(DimensionError):
        classical_maps(0)


def test_form_arity():
    with pytest.raises(ValueError):
        OMEGA_CANONICAL([0.0, 0.0], [1.0, 0.0])
    with pytest.raises(DimensionError):
        canonical_eta_eval([0.0, 0.0], [1.0, 0.0])


def test_form_values():
    # dw - y dx at (x, y, w) = (1, 2, 3) on (1, 0, 5)
    assert canonical_eta_eval([1.0, 2.0, 3.0], [1.0, 0.0, 5.0]) == 3.0
    assert canonical_omega_eval([0.0, 0.0], [1.0, 0.0], [0.0, 1.0]) == 1.0
    e = np.eye(4)
    assert tangent_omega_eval(np.zeros(4), e[0], e[3]) == 1.0
    assert tangent_omega_eval(np.zeros(4), e[2], e[1]) == 1.0
