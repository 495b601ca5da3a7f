"""
Manufactured problems with exact solution e^{-t} prod_d X(x_d), X the quartic
bump that vanishes with its first derivative at both interval ends.
"""
import importlib
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from src.discretization.operators import CoefficientField
from src.exceptions import DomainError
from src.models import Axis
from src.problems.base import ManufacturedProblem
from src.problems.fractional_calculus import PolynomialProfile
from src.stencil.base import FractionalOrder, OrderLike, as_order
from src.utils.logger import get_logger

logger = get_logger(__name__)

Evaluator = Callable[[np.ndarray, np.ndarray, np.ndarray, float], np.ndarray]
InitialEvaluator = Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]


def _open_order(nu: OrderLike) -> FractionalOrder:
    order = as_order(nu)
    if order.nu >= 2.0:
        raise DomainError(f"Problem orders must lie in (1, 2), got {order.nu}")
    return order


class SeparableBumpProblem(ManufacturedProblem):
    """Exact u = e^{-t} prod_d X_d(x_d).

    The coefficient of direction a is x_a^{nu_a} times the product of the other
    coordinates, times t when `time_dependent` is set.
    """

    def __init__(
        self,
        orders: Sequence[OrderLike],
        time_dependent: bool = False,
        bounds: Optional[List[Tuple[float, float]]] = None,
        t_final: float = 1.0,
        name: str = "bump",
    ):
        super().__init__(tuple(_open_order(nu) for nu in orders), bounds, t_final)
        self.time_dependent = time_dependent
        self.name = name
        self.profiles = [PolynomialProfile.bump(lo, hi) for lo, hi in self.bounds]

    def _coords(self, x, y, z) -> List[np.ndarray]:
        return [np.asarray(c, dtype=np.float64) for c in (x, y, z)[:self.dimension]]

    def _coefficient_value(self, a: int, coords: List[np.ndarray], t: float) -> np.ndarray:
        value = coords[a] ** self.orders[a].nu
        for d, c in enumerate(coords):
            if d != a:
                value = value * c
        if self.time_dependent:
            value = value * t
        return value

    def coefficient(self, axis: Axis) -> CoefficientField:
        a = axis.index
        if a >= self.dimension:
            raise DomainError(f"{self.describe()} has no {axis.value} direction")

        def field(x, y, z, t):
            return self._coefficient_value(a, self._coords(x, y, z), t)

        return field

    def _factors(self, coords: List[np.ndarray]) -> List[np.ndarray]:
        return [p.value(c) for p, c in zip(self.profiles, coords)]

    def exact(self, x, y, z, t):
        value = np.exp(-t)
        for factor in self._factors(self._coords(x, y, z)):
            value = value * factor
        return value

    def forcing(self, x, y, z, t):
        coords = self._coords(x, y, z)
        factors = self._factors(coords)
        decay = np.exp(-t)

        f = -self.exact(x, y, z, t)
        for a, (profile, coord) in enumerate(zip(self.profiles, coords)):
            term = decay * self._coefficient_value(a, coords, t) * profile.riesz(coord, self.orders[a])
            for d, factor in enumerate(factors):
                if d != a:
                    term = term * factor
            f = f - term
        return f


def problem_1d(alpha: OrderLike) -> SeparableBumpProblem:
    """u = e^{-t} x^2 (1 - x)^2 on (0, 1), c = x^alpha t."""
    return SeparableBumpProblem((alpha,), time_dependent=True, name="1d")


def problem_2d(alpha: OrderLike, beta: OrderLike) -> SeparableBumpProblem:
    """u = e^{-t} x^2 (1 - x)^2 y^2 (1 - y)^2, c = x^alpha y, d = x y^beta."""
    return SeparableBumpProblem((alpha, beta), name="2d")


def problem_3d(alpha: OrderLike, beta: OrderLike, gamma: OrderLike) -> SeparableBumpProblem:
    """Three-factor bump with c = x^alpha y z, d = x y^beta z, e = x y z^gamma."""
    return SeparableBumpProblem((alpha, beta, gamma), name="3d")


class CustomProblem(ManufacturedProblem):
    """Problem assembled from user evaluators; the exact solution is optional."""

    def __init__(
        self,
        orders: Sequence[OrderLike],
        coefficients: Sequence[CoefficientField],
        forcing: Evaluator,
        initial: Optional[InitialEvaluator] = None,
        exact: Optional[Evaluator] = None,
        bounds: Optional[List[Tuple[float, float]]] = None,
        t_final: float = 1.0,
        name: str = "custom",
    ):
        super().__init__(tuple(as_order(nu) for nu in orders), bounds, t_final)
        if len(coefficients) != self.dimension:
            raise DomainError(
                f"Expected {self.dimension} coefficient fields, got {len(coefficients)}"
            )
        if initial is None and exact is None:
            raise DomainError("A custom problem needs an initial condition or an exact solution")
        self.name = name
        self._coefficients = list(coefficients)
        self._forcing = forcing
        self._initial = initial
        self._exact = exact

    @property
    def has_exact(self) -> bool:
        return self._exact is not None

    def coefficient(self, axis: Axis) -> CoefficientField:
        if axis.index >= self.dimension:
            raise DomainError(f"{self.describe()} has no {axis.value} direction")
        return self._coefficients[axis.index]

    def forcing(self, x, y, z, t):
        return self._forcing(x, y, z, t)

    def exact(self, x, y, z, t):
        if self._exact is None:
            return None
        return self._exact(x, y, z, t)

    def initial(self, x, y, z):
        if self._initial is not None:
            return self._initial(x, y, z)
        return self._exact(x, y, z, 0.0)


def load_custom_problem(path: str) -> ManufacturedProblem:
    """Import `module:callable` and call it with no arguments."""
    module_name, sep, attr = path.partition(":")
    if not sep or not module_name or not attr:
        raise DomainError(f"Custom problem path must look like 'module:callable', got '{path}'")

    try:
        module = importlib.import_module(module_name)
        factory = getattr(module, attr)
    except (ImportError, AttributeError) as e:
        raise DomainError(f"Cannot load custom problem '{path}': {e}") from e

    try:
        problem = factory()
    except DomainError:
        raise
    except Exception as e:
        raise DomainError(f"Custom problem factory '{path}' failed: {e}") from e

    if not isinstance(problem, ManufacturedProblem):
        raise DomainError(
            f"'{path}' returned {type(problem).__name__}, expected a ManufacturedProblem"
        )
    logger.info("Loaded custom problem", path=path, problem=problem.describe())
    return problem
