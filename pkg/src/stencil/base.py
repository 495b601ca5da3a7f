"""
Base interface for fractional difference weight providers.
"""
from abc import ABC, abstractmethod
from typing import Dict, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from src.exceptions import DomainError


class FractionalOrder(BaseModel):
    """Order nu of a Riesz derivative, 1 < nu <= 2."""
    model_config = ConfigDict(frozen=True)

    nu: float

    @field_validator("nu")
    @classmethod
    def _in_range(cls, value: float) -> float:
        if not 1.0 < value <= 2.0:
            raise ValueError(f"Fractional order must lie in (1, 2], got {value}")
        return float(value)

    def __float__(self) -> float:
        return self.nu


OrderLike = Union[float, FractionalOrder]


def as_order(nu: OrderLike) -> FractionalOrder:
    """Coerce a float or FractionalOrder into a validated FractionalOrder."""
    if isinstance(nu, FractionalOrder):
        return nu
    try:
        return FractionalOrder(nu=nu)
    except ValueError as e:
        # pydantic wraps validator errors; surface the domain error itself
        raise DomainError(f"Fractional order must lie in (1, 2], got {nu}") from e


def _readonly(values: np.ndarray) -> np.ndarray:
    values = np.ascontiguousarray(values, dtype=np.float64)
    values.flags.writeable = False
    return values


class StencilWeights(BaseModel):
    """The sequence g_0 .. g_{M} of the second-order fractional difference."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    nu: FractionalOrder
    g: np.ndarray

    @field_validator("g")
    @classmethod
    def _freeze(cls, g: np.ndarray) -> np.ndarray:
        return _readonly(g)

    @property
    def length(self) -> int:
        return int(self.g.shape[0])


class RieszRowWeights(BaseModel):
    """First column of the symmetric Toeplitz matrix of the Riesz stencil.

    w_0 = 2 g_1, w_1 = g_0 + g_2 and w_k = g_{k+1} for k >= 2.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    nu: FractionalOrder
    w: np.ndarray

    @field_validator("w")
    @classmethod
    def _freeze(cls, w: np.ndarray) -> np.ndarray:
        return _readonly(w)

    @property
    def n(self) -> int:
        return int(self.w.shape[0])

    @property
    def diagonal(self) -> float:
        return float(self.w[0])


class WeightProvider(ABC):
    """Source of the stencil weights used to assemble Riesz operators.

    Subclasses supply g_m; the symmetrized row weights and their cache are shared.
    """

    def __init__(self):
        self._row_cache: Dict[Tuple[float, int], RieszRowWeights] = {}

    @abstractmethod
    def grunwald_weights(self, nu: OrderLike, count: int) -> StencilWeights:
        """Return g_0 .. g_{count-1}."""
        pass

    def riesz_row_weights(self, nu: OrderLike, n: int) -> RieszRowWeights:
        """Return the length-n first column (2g_1, g_0+g_2, g_3, ..., g_n)."""
        order = as_order(nu)
        if n < 1:
            raise DomainError(f"Row length must be positive, got {n}")

        key = (order.nu, n)
        cached = self._row_cache.get(key)
        if cached is not None:
            return cached

        g = self.grunwald_weights(order, max(n + 1, 4)).g
        w = np.empty(n)
        w[0] = 2.0 * g[1]
        if n > 1:
            w[1] = g[0] + g[2]
        if n > 2:
            w[2:] = g[3:n + 1]

        row = RieszRowWeights(nu=order, w=w)
        self._row_cache[key] = row
        return row

    def clear_cache(self):
        """Drop cached row weights."""
        self._row_cache.clear()
