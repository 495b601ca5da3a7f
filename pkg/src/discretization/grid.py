"""
Uniform space-time grids over boxes.
"""
import math
from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.exceptions import DomainError
from src.models import Axis


class AxisSpec(BaseModel):
    """One spatial direction: [lower, upper] split into `cells` cells."""
    model_config = ConfigDict(frozen=True)

    lower: float = 0.0
    upper: float = 1.0
    cells: int = Field(ge=2)

    @model_validator(mode="after")
    def _ordered(self) -> "AxisSpec":
        if not self.upper > self.lower:
            raise ValueError(f"Axis upper bound {self.upper} must exceed lower bound {self.lower}")
        return self

    @property
    def dx(self) -> float:
        return (self.upper - self.lower) / self.cells

    @property
    def interior(self) -> int:
        return self.cells - 1

    def nodes(self) -> np.ndarray:
        """Interior node coordinates lower + i dx, i = 1 .. cells - 1."""
        return self.lower + self.dx * np.arange(1, self.cells)


class GridSpec(BaseModel):
    """Tensor grid of interior unknowns plus a uniform time partition of [0, t_final]."""
    model_config = ConfigDict(frozen=True)

    axes: Tuple[AxisSpec, ...]
    t_final: float = Field(default=1.0, gt=0.0)
    steps: int = Field(ge=1)

    @field_validator("axes")
    @classmethod
    def _one_to_three(cls, axes: Tuple[AxisSpec, ...]) -> Tuple[AxisSpec, ...]:
        if not 1 <= len(axes) <= 3:
            raise ValueError(f"Grids have 1 to 3 axes, got {len(axes)}")
        return axes

    @classmethod
    def uniform(
        cls,
        dimension: int,
        cells: int,
        steps: int = None,
        t_final: float = 1.0,
        lower: float = 0.0,
        upper: float = 1.0,
    ) -> "GridSpec":
        """Same cell count on every axis; steps defaults to the cell count."""
        axis = AxisSpec(lower=lower, upper=upper, cells=cells)
        return cls(axes=(axis,) * dimension, t_final=t_final, steps=steps or cells)

    @property
    def dimension(self) -> int:
        return len(self.axes)

    @property
    def dt(self) -> float:
        return self.t_final / self.steps

    @property
    def interior_shape(self) -> Tuple[int, ...]:
        return tuple(a.interior for a in self.axes)

    @property
    def interior_points(self) -> int:
        return math.prod(self.interior_shape)

    def axis(self, axis: Axis) -> AxisSpec:
        if axis.index >= self.dimension:
            raise DomainError(f"Axis {axis.value} does not exist on a {self.dimension}D grid")
        return self.axes[axis.index]

    def dx(self, axis: Axis) -> float:
        return self.axis(axis).dx

    def time(self, k: float) -> float:
        """t_k; fractional k gives intermediate levels such as t_{k+1/2}."""
        return k * self.dt

    def mesh(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """x, y, z coordinate arrays over the interior, 'ij' layout.

        Coordinates of axes the grid does not have are returned as zeros.
        """
        nodes = [a.nodes() for a in self.axes]
        grids = np.meshgrid(*nodes, indexing="ij")
        zeros = np.zeros(self.interior_shape)
        return tuple(grids) + (zeros,) * (3 - self.dimension)

    def coarsen(self, axis: Axis) -> "GridSpec":
        """Same grid with the cell count of one axis halved."""
        spec = self.axis(axis)
        if spec.cells % 2 != 0 or spec.cells < 4:
            raise DomainError(
                f"Cannot coarsen axis {axis.value} with {spec.cells} cells"
            )
        axes = list(self.axes)
        axes[axis.index] = spec.model_copy(update={"cells": spec.cells // 2})
        return self.model_copy(update={"axes": tuple(axes)})
