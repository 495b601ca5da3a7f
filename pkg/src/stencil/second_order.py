"""
Second-order weights for the left/right Riemann-Liouville derivatives and the
scalings that turn them into Riesz operators.
"""
import math
from typing import Union

import mpmath
import numpy as np
from scipy.special import gamma

from src.exceptions import DomainError
from src.stencil.base import (
    OrderLike,
    RieszRowWeights,
    StencilWeights,
    WeightProvider,
    as_order,
)

# The five-term difference cancels down to O(m^-4) of its largest term, so below
# this index it is summed at DIRECT_DPS digits; from here on the binomial series
# in 1/m converges like (3/m)^j.
SERIES_THRESHOLD = 7
DIRECT_DPS = 40
SERIES_TERMS = 48

# (shift k, coefficient) of g_m = sum c_k (m + k)^(3 - nu)
_FIVE_POINT = ((1, 1.0), (0, -4.0), (-1, 6.0), (-2, -4.0), (-3, 1.0))


def _direct_tail(s: float, m: np.ndarray) -> np.ndarray:
    """g_m for small m from the five powers in extended precision."""
    out = np.empty(m.shape[0])
    with mpmath.workdps(DIRECT_DPS):
        exponent = mpmath.mpf(s)
        for idx, mm in enumerate(m):
            terms = (c * mpmath.mpf(int(mm) + k) ** exponent for k, c in _FIVE_POINT)
            out[idx] = float(mpmath.fsum(terms))
    return out


def _series_tail(s: float, m: np.ndarray) -> np.ndarray:
    """g_m for large m from the expansion of (m + k)^s in powers of k/m.

    The j < 4 moments of the five-point coefficients vanish, so the sum starts at
    j = 4 and no cancellation happens between O(m^s) terms.
    """
    m = m.astype(np.float64)
    inv_m = 1.0 / m
    total = np.zeros_like(m)
    binom = 1.0
    inv_m_pow = np.ones_like(m)
    for j in range(1, SERIES_TERMS + 1):
        binom *= (s - j + 1) / j
        inv_m_pow = inv_m_pow * inv_m
        if j < 4:
            continue
        moment = sum(c * float(k) ** j for k, c in _FIVE_POINT)
        total += binom * moment * inv_m_pow
        if binom == 0.0:
            break
    return m ** s * total


class SecondOrderWeights(WeightProvider):
    """Piecewise closed-form weights g_m of the second-order scheme."""

    def grunwald_weights(self, nu: OrderLike, count: int) -> StencilWeights:
        order = as_order(nu)
        if count < 1:
            raise DomainError(f"Weight count must be positive, got {count}")

        s = 3.0 - order.nu
        g = np.zeros(max(count, 3))
        g[0] = 1.0
        g[1] = -4.0 + 2.0 ** s
        g[2] = 6.0 - 2.0 ** (2.0 + s) + 3.0 ** s

        if count > 3:
            m = np.arange(3, count)
            small = m < SERIES_THRESHOLD
            g[3:][small] = _direct_tail(s, m[small])
            if np.any(~small):
                g[3:][~small] = _series_tail(s, m[~small])

        return StencilWeights(nu=order, g=g[:count])


DEFAULT_PROVIDER = SecondOrderWeights()


def grunwald_weights(nu: OrderLike, count: int) -> StencilWeights:
    """g_0 .. g_{count-1} of the default weight family."""
    return DEFAULT_PROVIDER.grunwald_weights(nu, count)


def riesz_row_weights(nu: OrderLike, n: int) -> RieszRowWeights:
    """First column of the symmetric Riesz Toeplitz matrix for n interior points."""
    return DEFAULT_PROVIDER.riesz_row_weights(nu, n)


def riesz_coefficient(nu: OrderLike) -> float:
    """kappa_nu = 1 / (2 cos(nu pi / 2)); negative on (1, 2]."""
    order = as_order(nu)
    return 1.0 / (2.0 * math.cos(order.nu * math.pi / 2.0))


def xi_scale(
    nu: OrderLike,
    dx: float,
    dt: float,
    c_val: Union[float, np.ndarray],
) -> Union[float, np.ndarray]:
    """xi = -dt kappa_nu c / (2 Gamma(4 - nu) dx^nu), elementwise in c."""
    order = as_order(nu)
    if dx <= 0 or dt <= 0:
        raise DomainError(f"dx and dt must be positive, got dx={dx}, dt={dt}")

    c_arr = np.asarray(c_val, dtype=np.float64)
    if np.any(c_arr < 0):
        raise DomainError("Diffusion coefficient must be non-negative")

    factor = -dt * riesz_coefficient(order) / (2.0 * gamma(4.0 - order.nu) * dx ** order.nu)
    xi = factor * c_arr
    if xi.ndim == 0:
        return float(xi)
    return xi
