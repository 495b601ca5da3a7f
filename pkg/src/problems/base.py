"""
Base interface for problems with a known (or absent) exact solution.
"""
from abc import ABC, abstractmethod
from typing import List, Optional, Tuple

import numpy as np

from src.discretization.grid import AxisSpec, GridSpec
from src.discretization.operators import CoefficientField
from src.models import Axis
from src.stencil.base import FractionalOrder


class ManufacturedProblem(ABC):
    """u_t = sum_a c_a d^{nu_a} u / d|x_a|^{nu_a} + f on a box, zero on its boundary.

    Evaluators take coordinate arrays (x, y, z) and a time t; coordinates of
    axes the problem does not have arrive as zeros and are ignored.
    """

    name: str = "problem"

    def __init__(
        self,
        orders: Tuple[FractionalOrder, ...],
        bounds: Optional[List[Tuple[float, float]]] = None,
        t_final: float = 1.0,
    ):
        self.orders = tuple(orders)
        self.bounds = list(bounds or [(0.0, 1.0)] * len(self.orders))
        self.t_final = t_final

    @property
    def dimension(self) -> int:
        return len(self.orders)

    @property
    def axes(self) -> List[Axis]:
        return [Axis.from_index(i) for i in range(self.dimension)]

    @property
    def has_exact(self) -> bool:
        return True

    def order(self, axis: Axis) -> FractionalOrder:
        return self.orders[axis.index]

    @abstractmethod
    def coefficient(self, axis: Axis) -> CoefficientField:
        """Diffusion coefficient of the given direction."""
        pass

    @abstractmethod
    def forcing(self, x: np.ndarray, y: np.ndarray, z: np.ndarray, t: float) -> np.ndarray:
        """Source term f."""
        pass

    @abstractmethod
    def exact(self, x: np.ndarray, y: np.ndarray, z: np.ndarray, t: float) -> Optional[np.ndarray]:
        """Exact solution, or None when unknown."""
        pass

    def initial(self, x: np.ndarray, y: np.ndarray, z: np.ndarray) -> np.ndarray:
        """u_0; the exact solution at t = 0 unless overridden."""
        return self.exact(x, y, z, 0.0)

    def boundary_source(self, mesh: Tuple[np.ndarray, ...], t: float) -> Optional[np.ndarray]:
        """Additive right-hand-side contribution of boundary data (None means zero)."""
        return None

    def make_grid(self, cells: int, steps: Optional[int] = None) -> GridSpec:
        """Grid with `cells` cells per axis and `steps` time steps (default cells)."""
        axes = tuple(AxisSpec(lower=lo, upper=hi, cells=cells) for lo, hi in self.bounds)
        return GridSpec(axes=axes, t_final=self.t_final, steps=steps or cells)

    def sample_initial(self, grid: GridSpec) -> np.ndarray:
        return np.broadcast_to(self.initial(*grid.mesh()), grid.interior_shape).astype(np.float64)

    def sample_forcing(self, grid: GridSpec, t: float) -> np.ndarray:
        return np.broadcast_to(self.forcing(*grid.mesh(), t), grid.interior_shape).astype(np.float64)

    def sample_exact(self, grid: GridSpec, t: float) -> Optional[np.ndarray]:
        values = self.exact(*grid.mesh(), t)
        if values is None:
            return None
        return np.broadcast_to(values, grid.interior_shape).astype(np.float64)

    def describe(self) -> str:
        orders = ", ".join(f"{o.nu:g}" for o in self.orders)
        return f"{self.name}({orders})"
