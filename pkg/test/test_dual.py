import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from contact_mech.dual import DomainError, Dual, cos, exp, log, power, pow_, real, sin, sqrt


def var(value, index=0, size=1):
    return Dual.variable(value, index, size)


def test_product_rule():
    x, y = var(3.0, 0, 2), var(4.0, 1, 2)
    out = x * y + 2 * x
    assert out.value == 14.0
    assert out.partials.tolist() == [6.0, 3.0]


def test_quotient_and_reverse_ops():
    x = var(2.0)
    out = 1 / x - (5 - x)
    assert out.value == pytest.approx(0.5 - 3.0)
    assert out.partials[0] == pytest.approx(-0.25 + 1.0)


def test_elementary_functions():
    x = var(0.7)
    assert exp(x).partials[0] == pytest.approx(math.exp(0.7))
    assert log(x).partials[0] == pytest.approx(1 / 0.7)
    assert sqrt(x).partials[0] == pytest.approx(0.5 / math.sqrt(0.7))
    assert sin(x).partials[0] == pytest.approx(math.cos(0.7))
    assert cos(x).partials[0] == pytest.approx(-math.sin(0.7))


def test_power_with_constant_and_variable_exponent():
    x = var(2.0)
    assert power(x, 3).partials[0] == pytest.approx(12.0)
    assert (x ** 0.5).value == pytest.approx(math.sqrt(2.0))
    out = pow_(x, x)  # d/dx x^x = x^x (log x + 1)
    assert out.partials[0] == pytest.approx(4.0 * (math.log(2.0) + 1))


def test_negative_base_with_integer_exponent():
    assert power(-2.0, 3) == -8.0
    assert power(var(-2.0), 2).partials[0] == pytest.approx(-4.0)


@pytest.mark.parametrize(
    "thunk",
    [
        lambda: log(0.0),
        lambda: log(var(-1.0)),
        lambda: sqrt(-1.0),
        lambda: sqrt(var(0.0)),
        lambda: power(0.0, -1),
        lambda: power(-1.0, 0.5),
        lambda: var(1.0) / 0,
        lambda: 1 / var(0.0),
        lambda: pow_(-1.0, var(2.0)),
    ],
)
def test_domain_errors(thunk):
    with pytest.raises(DomainError):
        thunk()


def test_domain_error_carries_argument():
    with pytest.raises(DomainError) as err:
        log(-3.0)
    assert err.value.argument == -3.0
    assert isinstance(err.value, ValueError)


def test_domain_error_names_coordinate():
    err = DomainError("log of non-positive argument", argument=0.0, coordinate="V")
    assert "'V'" in str(err)
    assert err.coordinate == "V"


def test_exp_overflow_is_a_domain_error():
    with pytest.raises(DomainError):
        exp(1e4)


def test_nested_duals_give_second_derivative():
    # outer level differentiates the inner one: d2/dx2 x^3 = 6x
    inner = Dual.variable(2.0, 0, 1)
    outer_partials = np.empty(1, dtype=object)
    outer_partials[0] = Dual(1.0, np.zeros(1))
    x = Dual(inner, outer_partials)
    out = x * x * x
    assert real(out) == 8.0
    assert out.partials[0].partials[0] == pytest.approx(12.0)


def test_comparisons_use_real_part():
    assert var(1.0) < var(2.0)
    assert var(2.0) >= 2.0
    assert float(var(1.5)) == 1.5


@given(st.floats(min_value=0.1, max_value=10), st.floats(min_value=-3, max_value=3))
def test_power_derivative_matches_formula(x, k):
    out = power(Dual.variable(x, 0, 1), k)
    assert out.partials[0] == pytest.approx(k * x ** (k - 1), rel=1e-9, abs=1e-12)
