"""
Dense two-grid analysis for constant-coefficient line operators.

Everything here forms dense matrices and is meant for small n. The
multigrid solver does not use this module.
"""
from typing import Optional

import numpy as np
import scipy.linalg

from src.discretization.grid import GridSpec
from src.discretization.operators import DirectionalOperator, build_directional_operator
from src.exceptions import DomainError
from src.models import Axis, CoarseOperator, TwoGridAnalysis
from src.solvers.toeplitz import SymmetricToeplitz, dense_expand
from src.stencil.base import OrderLike
from src.stencil.second_order import DEFAULT_PROVIDER


def constant_coefficient_operator(
    nu: OrderLike,
    cells: int,
    c: float = 1.0,
    dt: Optional[float] = None,
) -> DirectionalOperator:
    """1D operator on (0, 1) with c constant; dt defaults to dx."""
    dt = 1.0 / cells if dt is None else dt
    grid = GridSpec.uniform(1, cells, steps=1, t_final=dt)
    return build_directional_operator(grid, Axis.X, nu, lambda x, y, z, t: c, 0.5 * grid.dt)


def system_matrix(op: DirectionalOperator) -> np.ndarray:
    """Dense I - diag(xi) T of a single-line operator."""
    if op.line_count != 1:
        raise DomainError("Dense analysis needs a single-line (1D) operator")
    t = dense_expand(op.toeplitz)
    return np.eye(op.line_length) - op.xi_lines[0][:, None] * t


def restriction_matrix(n: int) -> np.ndarray:
    """Dense full-weighting matrix, shape ((n - 1) / 2, n)."""
    if n < 3 or n % 2 == 0:
        raise DomainError(f"Restriction needs an odd length >= 3, got {n}")
    m = (n - 1) // 2
    r = np.zeros((m, n))
    for j in range(m):
        r[j, 2 * j:2 * j + 3] = (0.25, 0.5, 0.25)
    return r


def diagonal_norm(a: np.ndarray, e: np.ndarray) -> float:
    """sqrt((D e, e)) with D the diagonal of a."""
    return float(np.sqrt(np.dot(np.diag(a) * e, e)))


def energy_norm(a: np.ndarray, e: np.ndarray) -> float:
    """sqrt((A e, e))."""
    return float(np.sqrt(np.dot(a @ e, e)))


def residual_energy_norm(a: np.ndarray, e: np.ndarray) -> float:
    """sqrt((D^{-1} A e, A e))."""
    ae = a @ e
    return float(np.sqrt(np.dot(ae / np.diag(a), ae)))


def smoothing_spectral_radius(a: np.ndarray) -> float:
    """eta0 = rho(D^{-1} A), through the symmetric similar matrix D^{-1/2} A D^{-1/2}."""
    d = 1.0 / np.sqrt(np.diag(a))
    return float(np.max(np.abs(scipy.linalg.eigvalsh(d[:, None] * a * d[None, :]))))


def tgm_bound(eta0: float, omega: float) -> float:
    """sqrt(1 - 2 sigma / 5) with sigma = omega (2 - omega eta0)."""
    sigma = omega * (2.0 - omega * eta0)
    return float(np.sqrt(1.0 - 2.0 * sigma / 5.0))


def _rediscretized(op: DirectionalOperator) -> np.ndarray:
    """Coarse I - xi_H T_H on half the cells; xi scales with dx^{-nu}."""
    m = (op.line_length - 1) // 2
    t_coarse = dense_expand(SymmetricToeplitz(DEFAULT_PROVIDER.riesz_row_weights(op.nu, m).w))
    xi_coarse = float(op.xi_lines[0, 0]) * 2.0 ** (-op.nu.nu)
    return np.eye(m) - xi_coarse * t_coarse


def two_grid_matrix(
    op: DirectionalOperator,
    omega: float = 1.0,
    pre_sweeps: int = 0,
    post_sweeps: int = 1,
    coarse: CoarseOperator = CoarseOperator.GALERKIN,
) -> np.ndarray:
    """Error propagation S^post (I - P A_H^{-1} R A) S^pre of one two-grid cycle."""
    a = system_matrix(op)
    n = op.line_length
    r = restriction_matrix(n)
    p = 2.0 * r.T

    if coarse == CoarseOperator.GALERKIN:
        a_coarse = r @ a @ p
    else:
        a_coarse = _rediscretized(op)

    smoother = np.eye(n) - omega * a / np.diag(a)[:, None]
    correction = np.eye(n) - p @ np.linalg.solve(a_coarse, r @ a)
    return (
        np.linalg.matrix_power(smoother, post_sweeps)
        @ correction
        @ np.linalg.matrix_power(smoother, pre_sweeps)
    )


def exact_energy_norm(a: np.ndarray, m: np.ndarray) -> float:
    """||M||_A = ||A^{1/2} M A^{-1/2}||_2."""
    eigvals, q = scipy.linalg.eigh(a)
    root = np.sqrt(eigvals)
    a_half = (q * root) @ q.T
    a_half_inv = (q / root) @ q.T
    return float(np.linalg.norm(a_half @ m @ a_half_inv, 2))


def _require_constant(op: DirectionalOperator):
    xi = op.xi_lines
    if op.line_count != 1 or np.ptp(xi) > 1e-12 * max(1.0, float(np.max(np.abs(xi)))):
        raise DomainError("Two-grid analysis assumes a single line with constant xi")


def analyze_two_grid(
    op: DirectionalOperator,
    trials: int = 64,
    omega: float = 1.0,
    coarse: CoarseOperator = CoarseOperator.GALERKIN,
    seed: int = 0,
) -> TwoGridAnalysis:
    """Sampled and exact energy-norm contraction of the two-grid cycle with one
    post-smoothing sweep, next to the smoothing-based bound."""
    _require_constant(op)
    if trials < 1:
        raise DomainError(f"trials must be positive, got {trials}")

    a = system_matrix(op)
    m = two_grid_matrix(op, omega=omega, pre_sweeps=0, post_sweeps=1, coarse=coarse)
    eta0 = smoothing_spectral_radius(a)

    rng = np.random.default_rng(seed)
    factor = 0.0
    for _ in range(trials):
        e = rng.standard_normal(op.line_length)
        factor = max(factor, energy_norm(a, m @ e) / energy_norm(a, e))

    return TwoGridAnalysis(
        n=op.line_length,
        omega=omega,
        coarse=coarse,
        eta0=eta0,
        sigma=omega * (2.0 - omega * eta0),
        bound=tgm_bound(eta0, omega),
        measured_factor=factor,
        exact_norm=exact_energy_norm(a, m),
    )


def measure_tgm_contraction(
    op: DirectionalOperator,
    trials: int = 64,
    omega: float = 1.0,
    coarse: CoarseOperator = CoarseOperator.GALERKIN,
    seed: int = 0,
) -> float:
    """Largest observed ||M e||_A / ||e||_A over random errors e."""
    return analyze_two_grid(op, trials, omega, coarse, seed).measured_factor
