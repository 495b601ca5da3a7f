"""
Directional Riesz operators A = diag(xi) T at a half time level.

Fields are stored as arrays indexed [i, j, l] over interior points. Every
directional operation gathers the lines along its axis into a contiguous
(lines, n) batch, works on the batch, and scatters back.
"""
from typing import Callable, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from src.discretization.grid import GridSpec
from src.exceptions import DomainError, ShapeMismatchError
from src.models import Axis
from src.solvers.toeplitz import (
    CirculantSpectrum,
    SymmetricToeplitz,
    ToeplitzWorkspace,
    embed_circulant,
    toeplitz_matvec,
)
from src.stencil.base import FractionalOrder, OrderLike, WeightProvider, as_order
from src.stencil.second_order import DEFAULT_PROVIDER, xi_scale

# c(x, y, z, t) evaluated on coordinate arrays; unused coordinates arrive as zeros
CoefficientField = Callable[[np.ndarray, np.ndarray, np.ndarray, float], np.ndarray]

MIN_LINE_LENGTH = 3


def to_lines(field: np.ndarray, axis: int) -> np.ndarray:
    """Gather the lines of `field` along `axis` into a contiguous (lines, n) array."""
    moved = np.moveaxis(field, axis, -1)
    return np.ascontiguousarray(moved).reshape(-1, field.shape[axis])


def from_lines(lines: np.ndarray, axis: int, shape: Tuple[int, ...]) -> np.ndarray:
    """Inverse of to_lines."""
    moved_shape = tuple(s for k, s in enumerate(shape) if k != axis) + (shape[axis],)
    return np.ascontiguousarray(np.moveaxis(lines.reshape(moved_shape), -1, axis))


class DirectionalOperator(BaseModel):
    """A^{k+1/2} along one axis: xi per grid point times the symmetric Toeplitz T.

    T holds the unscaled Riesz row weights; xi carries the sign and every scale
    factor, so xi >= 0 everywhere.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    axis: Axis
    nu: FractionalOrder
    toeplitz: SymmetricToeplitz
    spectrum: CirculantSpectrum
    xi: np.ndarray
    xi_lines: np.ndarray
    line_length: int
    dx: float

    @property
    def field_shape(self) -> Tuple[int, ...]:
        return self.xi.shape

    @property
    def line_count(self) -> int:
        return int(self.xi_lines.shape[0])

    @property
    def diagonal_weight(self) -> float:
        return float(self.toeplitz.first_column[0])

    def check_field(self, field: np.ndarray):
        if field.shape != self.field_shape:
            raise ShapeMismatchError(
                f"Operator along {self.axis.value} expects shape {self.field_shape}, "
                f"got {field.shape}"
            )

    def workspace(self) -> ToeplitzWorkspace:
        """Scratch buffer sized for one full sweep of this operator."""
        return ToeplitzWorkspace((self.line_count,), self.line_length)


def _sample_coefficient(grid: GridSpec, coeff: CoefficientField, t: float) -> np.ndarray:
    x, y, z = grid.mesh()
    values = np.asarray(coeff(x, y, z, t), dtype=np.float64)
    values = np.broadcast_to(values, grid.interior_shape)

    bad = ~np.isfinite(values) | (values < 0)
    if np.any(bad):
        point = tuple(int(i) for i in np.argwhere(bad)[0])
        coords = tuple(float(c[point]) for c in (x, y, z)[:grid.dimension])
        raise DomainError(
            f"Diffusion coefficient must be finite and non-negative; "
            f"got {values[point]} at index {point}, coordinates {coords}, t={t}"
        )
    return values


def build_directional_operator(
    grid: GridSpec,
    axis: Axis,
    nu: OrderLike,
    coeff: CoefficientField,
    t_half: float,
    provider: Optional[WeightProvider] = None,
) -> DirectionalOperator:
    """Assemble A along `axis` with the coefficient sampled at t_half."""
    order = as_order(nu)
    provider = provider or DEFAULT_PROVIDER
    n = grid.axis(axis).interior
    if n < MIN_LINE_LENGTH:
        raise DomainError(
            f"Axis {axis.value} needs at least {MIN_LINE_LENGTH} interior points, got {n}"
        )

    weights = provider.riesz_row_weights(order, n)
    toeplitz = SymmetricToeplitz(weights.w)
    spectrum = embed_circulant(toeplitz)

    c = _sample_coefficient(grid, coeff, t_half)
    dx = grid.dx(axis)
    xi = np.asarray(xi_scale(order, dx, grid.dt, c), dtype=np.float64).reshape(grid.interior_shape)
    xi.flags.writeable = False
    xi_lines = to_lines(xi, axis.index)
    xi_lines.flags.writeable = False

    return DirectionalOperator(
        axis=axis,
        nu=order,
        toeplitz=toeplitz,
        spectrum=spectrum,
        xi=xi,
        xi_lines=xi_lines,
        line_length=n,
        dx=dx,
    )


def apply_lines(
    op: DirectionalOperator,
    lines: np.ndarray,
    workspace: Optional[ToeplitzWorkspace] = None,
) -> np.ndarray:
    """A on a (lines, n) batch already in the operator's line layout."""
    return op.xi_lines * toeplitz_matvec(op.spectrum, lines, workspace)


def apply(
    op: DirectionalOperator,
    field: np.ndarray,
    workspace: Optional[ToeplitzWorkspace] = None,
) -> np.ndarray:
    """A u: every line along op.axis multiplied by diag(xi_line) T."""
    op.check_field(field)
    axis = op.axis.index
    lines = to_lines(field, axis)
    return from_lines(apply_lines(op, lines, workspace), axis, field.shape)


def apply_shifted(
    op: DirectionalOperator,
    field: np.ndarray,
    sign: int,
    workspace: Optional[ToeplitzWorkspace] = None,
) -> np.ndarray:
    """(I + sign A) u for sign in {+1, -1}."""
    if sign not in (1, -1):
        raise DomainError(f"sign must be +1 or -1, got {sign}")
    return field + sign * apply(op, field, workspace)
