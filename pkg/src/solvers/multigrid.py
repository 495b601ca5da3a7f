"""
Geometric V-cycle multigrid for the batched line systems (I - diag(xi) T) u = f.

All vectors are handled in line layout, shape (lines, n): every line along the
sweep axis is its own system sharing T but with its own xi. A 1-D vector is
accepted wherever the hierarchy has a single line.
"""
import time
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from src.discretization.grid import GridSpec
from src.discretization.operators import (
    CoefficientField,
    DirectionalOperator,
    build_directional_operator,
    from_lines,
    to_lines,
)
from src.exceptions import DomainError, ShapeMismatchError, SolverDivergenceError
from src.models import Axis, MultigridConfig, SmootherConfig, SolveStats, is_dyadic_minus_one
from src.solvers.toeplitz import ToeplitzWorkspace, dense_expand, toeplitz_matvec
from src.stencil.base import OrderLike, WeightProvider
from src.utils.logger import get_logger

logger = get_logger(__name__)

Rows = Optional[np.ndarray]

# floor for recorded residual ratios; a line solved exactly still logs a positive entry
RESIDUAL_FLOOR = float(np.finfo(np.float64).tiny)


def restrict(fine: np.ndarray) -> np.ndarray:
    """Full weighting (1, 2, 1) / 4 along the last axis; n_f = 2m + 1 -> m."""
    n_f = fine.shape[-1]
    if n_f < 3 or n_f % 2 == 0:
        raise DomainError(f"Restriction needs an odd length >= 3, got {n_f}")
    return 0.25 * (fine[..., 0:n_f - 1:2] + 2.0 * fine[..., 1::2] + fine[..., 2::2])


def prolong(coarse: np.ndarray) -> np.ndarray:
    """Linear interpolation along the last axis, m -> 2m + 1; equals 2 R^T."""
    m = coarse.shape[-1]
    if m < 1:
        raise DomainError("Prolongation needs at least one coarse point")
    fine = np.empty(coarse.shape[:-1] + (2 * m + 1,))
    fine[..., 1::2] = coarse
    padded = np.zeros(coarse.shape[:-1] + (m + 2,))
    padded[..., 1:-1] = coarse
    fine[..., 0::2] = 0.5 * (padded[..., :-1] + padded[..., 1:])
    return fine


class Level(BaseModel):
    """One grid of the hierarchy: its operator, Jacobi diagonal, the FFT scratch
    buffer shared by every matvec on this level and, at the coarsest level, the
    inverses of the small dense line systems."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    operator: DirectionalOperator
    diagonal: np.ndarray
    workspace: ToeplitzWorkspace
    coarse_inverse: Optional[np.ndarray] = None

    @property
    def n(self) -> int:
        return self.operator.line_length

    def xi(self, rows: Rows) -> np.ndarray:
        xi = self.operator.xi_lines
        return xi if rows is None else xi[rows]

    def matvec(self, u: np.ndarray, rows: Rows = None) -> np.ndarray:
        """(I - diag(xi) T) u on a batch of lines."""
        return u - self.xi(rows) * toeplitz_matvec(self.operator.spectrum, u, self.workspace)

    def residual(self, u: np.ndarray, f: np.ndarray, rows: Rows = None) -> np.ndarray:
        return f - self.matvec(u, rows)

    def direct_solve(self, f: np.ndarray, rows: Rows = None) -> np.ndarray:
        inverse = self.coarse_inverse if rows is None else self.coarse_inverse[rows]
        return np.einsum("bij,bj->bi", inverse, f)


def _coarse_inverse(op: DirectionalOperator) -> np.ndarray:
    t = dense_expand(op.toeplitz)
    systems = np.eye(op.line_length)[None, :, :] - op.xi_lines[:, :, None] * t[None, :, :]
    return np.linalg.inv(systems)


def _make_level(op: DirectionalOperator, coarsest: bool) -> Level:
    diagonal = 1.0 - op.xi_lines * op.diagonal_weight
    diagonal.flags.writeable = False
    inverse = _coarse_inverse(op) if coarsest else None
    return Level(operator=op, diagonal=diagonal, workspace=op.workspace(), coarse_inverse=inverse)


class MultigridHierarchy(BaseModel):
    """Re-discretized operators from the finest grid down to the coarsest."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    axis: Axis
    levels: List[Level]
    coarsest_size: int

    @classmethod
    def build(
        cls,
        grid: GridSpec,
        axis: Axis,
        nu: OrderLike,
        coeff: CoefficientField,
        t_half: float,
        coarsest_size: int = 7,
        provider: Optional[WeightProvider] = None,
        finest: Optional[DirectionalOperator] = None,
    ) -> "MultigridHierarchy":
        """Build every level with the same assembly routine as the fine operator.

        `finest` may carry an already assembled fine-grid operator to reuse.
        """
        n = grid.axis(axis).interior
        if not is_dyadic_minus_one(n):
            raise DomainError(
                f"Multigrid needs 2^k - 1 interior points along {axis.value}, got {n}"
            )
        if not is_dyadic_minus_one(coarsest_size):
            raise DomainError(f"coarsest_size must be 2^j - 1, got {coarsest_size}")

        ops = [finest or build_directional_operator(grid, axis, nu, coeff, t_half, provider)]
        level_grid = grid
        while ops[-1].line_length > coarsest_size:
            level_grid = level_grid.coarsen(axis)
            ops.append(build_directional_operator(level_grid, axis, nu, coeff, t_half, provider))

        levels = [_make_level(op, coarsest=(i == len(ops) - 1)) for i, op in enumerate(ops)]
        return cls(axis=axis, levels=levels, coarsest_size=coarsest_size)

    @property
    def finest(self) -> Level:
        return self.levels[0]

    @property
    def line_count(self) -> int:
        return self.finest.operator.line_count

    @property
    def depth(self) -> int:
        return len(self.levels)


def operator_storage_bytes(hier: MultigridHierarchy) -> int:
    """Bytes held by the hierarchy's first columns, spectra, xi vectors,
    diagonals and coarsest-level inverses."""
    total = 0
    for level in hier.levels:
        op = level.operator
        total += op.toeplitz.first_column.nbytes + op.spectrum.nbytes
        total += op.xi.nbytes + op.xi_lines.nbytes + level.diagonal.nbytes
        if level.coarse_inverse is not None:
            total += level.coarse_inverse.nbytes
    return int(total)


def weighted_jacobi(
    level: Level,
    u: np.ndarray,
    f: np.ndarray,
    omega: float,
    sweeps: int,
    rows: Rows = None,
) -> np.ndarray:
    """u <- u + omega D^{-1} (f - M u), `sweeps` times."""
    if sweeps < 0:
        raise DomainError(f"Sweep count must be non-negative, got {sweeps}")
    diagonal = level.diagonal if rows is None else level.diagonal[rows]
    for _ in range(sweeps):
        u = u + omega * level.residual(u, f, rows) / diagonal
    return u


def _v_cycle(
    hier: MultigridHierarchy,
    index: int,
    u: np.ndarray,
    f: np.ndarray,
    cfg: SmootherConfig,
    rows: Rows,
) -> np.ndarray:
    level = hier.levels[index]
    if level.coarse_inverse is not None:
        return level.direct_solve(f, rows)

    u = weighted_jacobi(level, u, f, cfg.omega_pre, cfg.nu1, rows)
    r_coarse = restrict(level.residual(u, f, rows))
    e_coarse = _v_cycle(hier, index + 1, np.zeros_like(r_coarse), r_coarse, cfg, rows)
    u = u + prolong(e_coarse)
    return weighted_jacobi(level, u, f, cfg.omega_post, cfg.nu2, rows)


def _as_batch(hier: MultigridHierarchy, v: np.ndarray, name: str) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    n = hier.finest.n
    if v.ndim == 1 and hier.line_count == 1:
        v = v[None, :]
    if v.shape != (hier.line_count, n):
        raise ShapeMismatchError(
            f"{name} must have shape {(hier.line_count, n)} for this hierarchy, got {v.shape}"
        )
    return v


def v_cycle(
    hier: MultigridHierarchy,
    u0: np.ndarray,
    f: np.ndarray,
    cfg: Optional[SmootherConfig] = None,
) -> np.ndarray:
    """One V-cycle: pre-smooth, restrict the residual, recurse or solve
    directly, prolong the correction, post-smooth."""
    cfg = cfg or SmootherConfig()
    shape = np.shape(u0)
    u = _as_batch(hier, u0, "u0")
    f = _as_batch(hier, f, "f")
    return _v_cycle(hier, 0, u, f, cfg, None).reshape(shape)


def solve(
    hier: MultigridHierarchy,
    u0: np.ndarray,
    f: np.ndarray,
    config: Optional[MultigridConfig] = None,
    tol: Optional[float] = None,
) -> Tuple[np.ndarray, SolveStats]:
    """Repeat V-cycles until every line has ||r||_2 / ||r_0||_2 < tol.

    Lines whose initial residual is zero take no iterations. Converged lines
    are frozen while the rest keep cycling.
    """
    config = config or MultigridConfig()
    tol = config.tol if tol is None else tol
    if not tol > 0:
        raise DomainError(f"Tolerance must be positive, got {tol}")

    shape = np.shape(u0)
    u = _as_batch(hier, u0, "u0").copy()
    f = _as_batch(hier, f, "f")
    finest = hier.finest

    r0 = np.linalg.norm(finest.residual(u, f), axis=1)
    active = r0 > 0
    iterations = np.zeros(hier.line_count, dtype=np.int64)
    history: List[float] = [1.0] if np.any(active) else []

    start = time.time()
    while np.any(active):
        if int(iterations.max()) >= config.max_iterations:
            lines = np.flatnonzero(active).tolist()
            logger.error(
                "Multigrid did not converge",
                axis=hier.axis.value,
                iterations=int(iterations.max()),
                unconverged=len(lines),
                relative_residual=history[-1],
            )
            raise SolverDivergenceError(
                f"Multigrid did not reach tol={tol} in {config.max_iterations} iterations",
                residual_history=history,
                iterations=int(iterations.max()),
                unconverged_lines=lines,
            )

        rows = np.flatnonzero(active)
        sub_rows = None if rows.size == hier.line_count else rows
        u_rows = _v_cycle(hier, 0, u[rows], f[rows], config.smoother, sub_rows)
        u[rows] = u_rows
        iterations[rows] += 1

        relative = np.linalg.norm(finest.residual(u_rows, f[rows], sub_rows), axis=1) / r0[rows]
        if not np.all(np.isfinite(relative)):
            raise SolverDivergenceError(
                "Multigrid produced a non-finite residual",
                residual_history=history,
                iterations=int(iterations.max()),
                unconverged_lines=rows.tolist(),
            )
        history.append(max(float(relative.max()), RESIDUAL_FLOOR))
        active[rows[relative < tol]] = False

    stats = SolveStats(
        iterations=int(iterations.max()) if iterations.size else 0,
        line_count=hier.line_count,
        total_line_iterations=int(iterations.sum()),
        residual_history=history,
        converged=True,
    )
    logger.debug(
        "Multigrid solve finished",
        axis=hier.axis.value,
        lines=stats.line_count,
        max_iterations=stats.iterations,
        average_iterations=stats.average_iterations,
        worst_relative_residual=history[-1] if history else 0.0,
        elapsed_ms=(time.time() - start) * 1000,
    )
    return u.reshape(shape), stats


def solve_field(
    hier: MultigridHierarchy,
    u0: np.ndarray,
    f: np.ndarray,
    config: Optional[MultigridConfig] = None,
) -> Tuple[np.ndarray, SolveStats]:
    """Solve every line of a field along the hierarchy's axis.

    Divergence errors are re-raised tagged with the sweep axis.
    """
    hier.finest.operator.check_field(u0)
    hier.finest.operator.check_field(f)
    axis = hier.axis.index
    try:
        lines, stats = solve(hier, to_lines(u0, axis), to_lines(f, axis), config)
    except SolverDivergenceError as e:
        raise e.with_axis(hier.axis.value) from e
    return from_lines(lines, axis, u0.shape), stats
