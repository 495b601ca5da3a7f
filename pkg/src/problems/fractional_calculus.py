"""
Riemann-Liouville derivatives of power functions and of polynomial profiles
that vanish at both ends of an interval.
"""
from typing import Dict, Union

import numpy as np
from scipy.special import gamma

from src.exceptions import DomainError
from src.models import Side
from src.stencil.base import OrderLike, as_order
from src.stencil.second_order import riesz_coefficient

ArrayLike = Union[float, np.ndarray]


def _gamma_ratio(p: float, nu: float) -> float:
    arg = p + 1.0 - nu
    if arg <= 0 and float(arg).is_integer():
        raise DomainError(f"Gamma({arg}) has a pole (p={p}, nu={nu})")
    return float(gamma(p + 1.0) / gamma(arg))


def rl_power_derivative(p: float, nu: OrderLike, s: ArrayLike, side: Side = Side.LEFT) -> ArrayLike:
    """Order-nu Riemann-Liouville derivative of s^p, s = x - a (left) or b - x (right).

    Gamma(p + 1) / Gamma(p + 1 - nu) * s^(p - nu); the formula is the same on
    both sides once s is measured from the matching end.
    """
    order = as_order(nu)
    side = Side(side)
    if p <= -1:
        raise DomainError(f"Power must exceed -1, got {p}")

    s_arr = np.asarray(s, dtype=np.float64)
    if np.any(s_arr < 0):
        raise DomainError(f"Distance to the {side.value} end must be non-negative")

    ratio = _gamma_ratio(p, order.nu)
    with np.errstate(divide="ignore"):
        values = ratio * s_arr ** (p - order.nu)
    if values.ndim == 0:
        return float(values)
    return values


class PolynomialProfile:
    """X(x) on [lower, upper] given as sum a_p (x - lower)^p and, equivalently,
    as sum b_p (upper - x)^p."""

    def __init__(
        self,
        lower: float,
        upper: float,
        left: Dict[int, float],
        right: Dict[int, float],
    ):
        if not upper > lower:
            raise DomainError(f"Interval [{lower}, {upper}] is empty")
        self.lower = lower
        self.upper = upper
        self.left = dict(left)
        self.right = dict(right)

    @classmethod
    def bump(cls, lower: float = 0.0, upper: float = 1.0) -> "PolynomialProfile":
        """(x - lower)^2 (upper - x)^2, symmetric about the midpoint."""
        length = upper - lower
        coeffs = {2: length ** 2, 3: -2.0 * length, 4: 1.0}
        return cls(lower, upper, coeffs, coeffs)

    def _distances(self, x: ArrayLike):
        x = np.asarray(x, dtype=np.float64)
        return np.clip(x - self.lower, 0.0, None), np.clip(self.upper - x, 0.0, None)

    def value(self, x: ArrayLike) -> np.ndarray:
        s_left, _ = self._distances(x)
        return sum(a * s_left ** p for p, a in self.left.items())

    def rl_derivative(self, x: ArrayLike, nu: OrderLike, side: Side) -> np.ndarray:
        """Left or right Riemann-Liouville derivative, term by term."""
        s_left, s_right = self._distances(x)
        if Side(side) == Side.LEFT:
            return sum(a * rl_power_derivative(p, nu, s_left, Side.LEFT) for p, a in self.left.items())
        return sum(a * rl_power_derivative(p, nu, s_right, Side.RIGHT) for p, a in self.right.items())

    def riesz(self, x: ArrayLike, nu: OrderLike) -> np.ndarray:
        """-kappa_nu (left + right) Riemann-Liouville derivatives of X."""
        kappa = riesz_coefficient(nu)
        return -kappa * (self.rl_derivative(x, nu, Side.LEFT) + self.rl_derivative(x, nu, Side.RIGHT))

    def max_value(self) -> float:
        """Max of X over a fine sample of the interval."""
        return float(np.max(self.value(np.linspace(self.lower, self.upper, 2049))))

