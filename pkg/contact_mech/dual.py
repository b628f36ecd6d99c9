"""
Forward-mode dual numbers.

A `Dual` carries a value together with the vector of its partial derivatives
with respect to the active coordinates of one evaluation. The value may itself
be a `Dual`, which is how second derivatives are obtained (see
`numeric_diff.hessian`): the outer level differentiates the inner one.
"""

import math
import numbers
from typing import Any, Union

import numpy as np


class DomainError(ValueError):
    """A scalar function was evaluated outside its domain (log of 0, sqrt of -1, ...)."""

    def __init__(self, message: str, argument: float | None = None, coordinate: str | None = None):
        self.argument = argument
        self.coordinate = coordinate
        if coordinate is not None:
            message = f'{message} (at coordinate {coordinate!r})'
        super().__init__(message)


class Dual:
    """Value plus a fixed-length vector of partial derivatives."""

    __slots__ = ('value', 'partials')

    def __init__(self, value: Any, partials: np.ndarray):
        self.value = value
        self.partials = partials

    @staticmethod
    def variable(value: float, index: int, size: int) -> 'Dual':
        """The `index`-th active coordinate of a `size`-dimensional evaluation."""
        partials = np.zeros(size)
        partials[index] = 1.0
        return Dual(float(value), partials)

    def __repr__(self):
        return f'Dual({self.value!r}, {self.partials!r})'

    # Arithmetic. Plain numbers are constants; ndarrays are deferred to numpy so
    # that `Dual * object_array` broadcasts elementwise in nested evaluations.

    def __add__(self, other):
        if isinstance(other, Dual):
            return Dual(self.value + other.value, self.partials + other.partials)
        if isinstance(other, numbers.Real):
            return Dual(self.value + other, self.partials)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return Dual(-self.value, -self.partials)

    def __pos__(self):
        return self

    def __sub__(self, other):
        if isinstance(other, Dual):
            return Dual(self.value - other.value, self.partials - other.partials)
        if isinstance(other, numbers.Real):
            return Dual(self.value - other, self.partials)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, numbers.Real):
            return Dual(other - self.value, -self.partials)
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, Dual):
            return Dual(
                self.value * other.value,
                self.value * other.partials + other.value * self.partials,
            )
        if isinstance(other, numbers.Real):
            return Dual(self.value * other, self.partials * other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Dual):
            if real(other) == 0.0:
                raise DomainError('division by zero')
            return Dual(
                self.value / other.value,
                (self.partials * other.value - other.partials * self.value)
                / (other.value * other.value),
            )
        if isinstance(other, numbers.Real):
            if other == 0:
                raise DomainError('division by zero')
            return Dual(self.value / other, self.partials / other)
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, numbers.Real):
            if real(self) == 0.0:
                raise DomainError('division by zero')
            return Dual(
                other / self.value,
                -other * self.partials / (self.value * self.value),
            )
        return NotImplemented

    def __pow__(self, other):
        if isinstance(other, Dual):
            return exp(other * log(self))
        if isinstance(other, numbers.Real):
            return power(self, other)
        return NotImplemented

    def __rpow__(self, other):
        if isinstance(other, numbers.Real):
            return exp(self * log(other))
        return NotImplemented

    # Comparisons look at the real part only, so that domain checks and
    # branch-free code can treat duals like floats.

    def __lt__(self, other):
        return real(self) < real(other)

    def __le__(self, other):
        return real(self) <= real(other)

    def __gt__(self, other):
        return real(self) > real(other)

    def __ge__(self, other):
        return real(self) >= real(other)

    def __float__(self):
        return real(self)


Scalar = Union[float, Dual]


def real(x: Any) -> float:
    """Strips every dual level and returns the underlying float."""
    while isinstance(x, Dual):
        x = x.value
    return float(x)


def exp(x: Scalar) -> Scalar:
    if isinstance(x, Dual):
        e = exp(x.value)
        return Dual(e, e * x.partials)
    try:
        return math.exp(x)
    except OverflowError as e:
        raise DomainError(f'exp overflow for argument {x}', argument=x) from e


def log(x: Scalar) -> Scalar:
    if real(x) <= 0.0:
        raise DomainError(f'log of non-positive argument {real(x)}', argument=real(x))
    if isinstance(x, Dual):
        return Dual(log(x.value), x.partials / x.value)
    return math.log(x)


def sqrt(x: Scalar) -> Scalar:
    if real(x) < 0.0:
        raise DomainError(f'sqrt of negative argument {real(x)}', argument=real(x))
    if isinstance(x, Dual):
        if real(x) == 0.0:
            raise DomainError('sqrt is not differentiable at 0', argument=0.0)
        s = sqrt(x.value)
        return Dual(s, x.partials / (2.0 * s))
    return math.sqrt(x)


def sin(x: Scalar) -> Scalar:
    if isinstance(x, Dual):
        return Dual(sin(x.value), cos(x.value) * x.partials)
    return math.sin(x)


def cos(x: Scalar) -> Scalar:
    if isinstance(x, Dual):
        return Dual(cos(x.value), -sin(x.value) * x.partials)
    return math.cos(x)


def power(x: Scalar, exponent: float) -> Scalar:
    """x ** exponent for a constant real exponent."""
    base = real(x)
    integral = float(exponent).is_integer()
    if base == 0.0 and exponent < 0:
        raise DomainError(f'0 raised to negative power {exponent}', argument=base)
    if base < 0.0 and not integral:
        raise DomainError(
            f'negative base {base} raised to non-integer power {exponent}', argument=base
        )
    if isinstance(x, Dual):
        if exponent == 0:
            return Dual(power(x.value, 0.0), x.partials * 0.0)
        return Dual(
            power(x.value, exponent),
            exponent * power(x.value, exponent - 1.0) * x.partials,
        )
    return math.pow(x, exponent)


def pow_(x: Scalar, y: Scalar) -> Scalar:
    """General x ** y; dispatches to `power` when the exponent is constant."""
    if isinstance(y, Dual):
        if isinstance(x, Dual) or real(x) > 0.0:
            return exp(y * log(x))
        raise DomainError(f'non-positive base {real(x)} with variable exponent', argument=real(x))
    return power(x, float(y))


FUNCTIONS = {
    'exp': exp,
    'log': log,
    'sin': sin,
    'cos': cos,
    'sqrt': sqrt,
}
