"""
Exact forward-mode differentiation of scalar fields and coordinate maps, plus a
central-difference oracle to cross-check it.

Scalar fields are plain Python callables of positional coordinates, written with
the elementary functions of `contact_mech.dual` so that they accept both floats
and `Dual` numbers. Coordinate maps take one coordinate vector and return a
sequence of outputs.
"""

from typing import Any, Callable, Mapping, Sequence

import numpy as np

from .dual import DomainError, Dual, real

DEFAULT_FD_STEP = 1e-5


class DimensionError(ValueError):
    """Coordinate vector does not match the arity of a field, map or form."""


def as_vector(x: Sequence[float], size: int | None = None, what: str = 'point') -> np.ndarray:
    """Converts `x` to a float vector, checking its length when `size` is given."""
    vec = np.asarray(x, dtype=float).reshape(-1)
    if size is not None and vec.shape[0] != size:
        raise DimensionError(f'{what} has dimension {vec.shape[0]}, expected {size}')
    return vec


class ScalarField:
    """
    A smooth real-valued function of named coordinates.

    Parameters
    ----------
    names: coordinate names, in the order `fn` takes its positional arguments
    fn:    callable on floats and `Dual` numbers
    label: short name used in messages and reports (H, L, U, ...)
    """

    def __init__(
        self,
        names: Sequence[str],
        fn: Callable[..., Any],
        label: str = 'f',
        source: str | None = None,
    ):
        self.names = tuple(names)
        self.fn = fn
        self.label = label
        self.source = source

    @staticmethod
    def from_expression(
        source: str,
        names: Sequence[str],
        constants: Mapping[str, float] | None = None,
        label: str = 'f',
    ) -> 'ScalarField':
        """Builds a field from an expression string, see `contact_mech.expr`."""
        from .expr import field_from_expression  # pylint: disable=import-outside-toplevel

        return field_from_expression(source, names, constants, label)

    def __repr__(self):
        return f'ScalarField({self.label}; {", ".join(self.names)})'

    @property
    def arity(self) -> int:
        return len(self.names)

    def __call__(self, *args):
        return self.fn(*args)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError as e:
            raise KeyError(f'{self.label} has no coordinate {name!r}: {self.names}') from e

    def evaluate(self, args: Sequence[Any]) -> Any:
        """Calls the field on `args`, annotating domain errors with the point."""
        if len(args) != self.arity:
            raise DimensionError(
                f'{self.label} takes {self.arity} coordinates {self.names}, got {len(args)}'
            )
        try:
            return self.fn(*args)
        except DomainError as e:
            point = ', '.join(f'{n}={real(a):.6g}' for n, a in zip(self.names, args))
            err = DomainError(f'{self.label} undefined at ({point}): {e}', argument=e.argument)
            err.coordinate = e.coordinate
            raise err from e

    def value(self, x: Sequence[float]) -> float:
        return real(self.evaluate(as_vector(x, self.arity, self.label).tolist()))

    def gradient(self, x: Sequence[float]) -> np.ndarray:
        return _forward_gradient(self, as_vector(x, self.arity, self.label))

    def value_and_gradient(self, x: Sequence[float]) -> tuple[float, np.ndarray]:
        vec = as_vector(x, self.arity, self.label)
        out = self.evaluate(_seed(vec))
        if not isinstance(out, Dual):
            return float(out), np.zeros(self.arity)
        return float(out.value), np.asarray(out.partials, dtype=float)

    def hessian(self, x: Sequence[float]) -> np.ndarray:
        return _nested_hessian(self, as_vector(x, self.arity, self.label))

    def partial(self, name: str, x: Sequence[float]) -> float:
        return float(self.gradient(x)[self.index(name)])

    def restrict(self, fixed: Mapping[str, float], label: str | None = None) -> 'ScalarField':
        """Freezes the coordinates in `fixed`, returning a field of the remaining ones."""
        unknown = set(fixed) - set(self.names)
        if unknown:
            raise KeyError(f'{self.label} has no coordinates {sorted(unknown)}')
        free = [n for n in self.names if n not in fixed]
        parent = self

        def restricted(*args):
            it = iter(args)
            full = [fixed[n] if n in fixed else next(it) for n in parent.names]
            return parent.fn(*full)

        return ScalarField(free, restricted, label or self.label)


def _seed(x: np.ndarray) -> list[Dual]:
    m = x.shape[0]
    return [Dual.variable(v, i, m) for i, v in enumerate(x)]


def _forward_gradient(f: ScalarField, x: np.ndarray) -> np.ndarray:
    out = f.evaluate(_seed(x))
    if not isinstance(out, Dual):
        return np.zeros(x.shape[0])
    return np.asarray(out.partials, dtype=float)


def _nested_hessian(f: ScalarField, x: np.ndarray) -> np.ndarray:
    m = x.shape[0]
    seeds = []
    for i, v in enumerate(x):
        outer_partials = np.empty(m, dtype=object)
        for j in range(m):
            outer_partials[j] = Dual(1.0 if i == j else 0.0, np.zeros(m))
        seeds.append(Dual(Dual.variable(v, i, m), outer_partials))
    out = f.evaluate(seeds)
    hess = np.zeros((m, m))
    if not isinstance(out, Dual):
        return hess
    for j, entry in enumerate(out.partials):
        if isinstance(entry, Dual):
            hess[j, :] = np.asarray(entry.partials, dtype=float)
    return hess


def _as_field(f: ScalarField | Callable, m: int) -> ScalarField:
    if isinstance(f, ScalarField):
        return f
    return ScalarField([f'x{i}' for i in range(m)], f)


def gradient(f: ScalarField | Callable, x: Sequence[float]) -> np.ndarray:
    """
    Exact gradient of `f` at `x` by forward-mode duals.

    Raises
    ------
    DimensionError if `x` does not match the arity of `f`
    DomainError if `f` is undefined at `x`
    """
    vec = as_vector(x)
    return _as_field(f, vec.shape[0]).gradient(vec)


def hessian(f: ScalarField | Callable, x: Sequence[float]) -> np.ndarray:
    """Exact matrix of second partials of `f` at `x`, by nesting duals."""
    vec = as_vector(x)
    return _as_field(f, vec.shape[0]).hessian(vec)


def fd_gradient(
    f: ScalarField | Callable, x: Sequence[float], h: float = DEFAULT_FD_STEP
) -> np.ndarray:
    """Central-difference gradient (f(x + h e_i) - f(x - h e_i)) / 2h."""
    if h <= 0:
        raise ValueError(f'finite-difference step must be positive, got {h}')
    vec = as_vector(x)
    field = _as_field(f, vec.shape[0])
    field.evaluate(vec.tolist())  # surface domain errors at x itself
    grad = np.zeros(vec.shape[0])
    for i in range(vec.shape[0]):
        up, down = vec.copy(), vec.copy()
        up[i] += h
        down[i] -= h
        grad[i] = (real(field.evaluate(up.tolist())) - real(field.evaluate(down.tolist()))) / (2 * h)
    return grad


def _check_map_input(m: Callable, vec: np.ndarray) -> None:
    dim_in = getattr(m, 'dim_in', None)
    if dim_in is not None and vec.shape[0] != dim_in:
        name = getattr(m, 'name', 'map')
        raise DimensionError(f'{name} takes {dim_in} coordinates, got {vec.shape[0]}')


def jacobian(m: Callable[[Sequence[Any]], Sequence[Any]], x: Sequence[float]) -> np.ndarray:
    """Exact Jacobian of a coordinate map; row i is the gradient of output i."""
    vec = as_vector(x)
    _check_map_input(m, vec)
    out = list(m(_seed(vec)))
    jac = np.zeros((len(out), vec.shape[0]))
    for i, component in enumerate(out):
        if isinstance(component, Dual):
            jac[i, :] = np.asarray(component.partials, dtype=float)
    return jac


def fd_jacobian(
    m: Callable[[Sequence[Any]], Sequence[Any]],
    x: Sequence[float],
    h: float = DEFAULT_FD_STEP,
) -> np.ndarray:
    """Central-difference Jacobian, column by column."""
    if h <= 0:
        raise ValueError(f'finite-difference step must be positive, got {h}')
    vec = as_vector(x)
    _check_map_input(m, vec)
    columns = []
    for i in range(vec.shape[0]):
        up, down = vec.copy(), vec.copy()
        up[i] += h
        down[i] -= h
        f_up = np.array([real(v) for v in m(up.tolist())])
        f_down = np.array([real(v) for v in m(down.tolist())])
        columns.append((f_up - f_down) / (2 * h))
    return np.column_stack(columns)
