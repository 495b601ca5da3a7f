"""
Time loop: initial data, one LOD step per time level, aggregate statistics.
"""
import time
from typing import Optional, Tuple

import numpy as np

from src.discretization.grid import GridSpec
from src.exceptions import DomainError
from src.models import MultigridConfig, RunReport, SchemeKind, SolutionField, is_dyadic_minus_one
from src.problems.base import ManufacturedProblem
from src.steppers.base import LODStepper, build_step_systems
from src.steppers.crank_nicolson import CrankNicolsonStepper
from src.steppers.douglas import DouglasStepper
from src.steppers.peaceman_rachford import PeacemanRachfordStepper
from src.utils.logger import get_logger

logger = get_logger(__name__)


def stepper_for(scheme: SchemeKind, config: Optional[MultigridConfig] = None) -> LODStepper:
    """Stepper instance for a scheme."""
    if scheme == SchemeKind.CN_1D:
        return CrankNicolsonStepper(config)
    if scheme == SchemeKind.PRAD_2D:
        return PeacemanRachfordStepper(config)
    return DouglasStepper(scheme, config)


def _check_inputs(problem: ManufacturedProblem, grid: GridSpec, scheme: SchemeKind):
    if not scheme.dimension == problem.dimension == grid.dimension:
        raise DomainError(
            f"Scheme {scheme.value} ({scheme.dimension}D) does not match a "
            f"{problem.dimension}D problem on a {grid.dimension}D grid"
        )
    for n in grid.interior_shape:
        if not is_dyadic_minus_one(n):
            raise DomainError(f"Grid needs 2^k cells per axis, got {n + 1}")


def forcing_at(problem: ManufacturedProblem, grid: GridSpec, t: float) -> np.ndarray:
    """F sampled at time t, including any boundary contribution."""
    forcing = problem.sample_forcing(grid, t)
    extra = problem.boundary_source(grid.mesh(), t)
    if extra is not None:
        forcing = forcing + extra
    return forcing


def run(
    problem: ManufacturedProblem,
    grid: GridSpec,
    scheme: SchemeKind,
    config: Optional[MultigridConfig] = None,
) -> Tuple[SolutionField, RunReport]:
    """Integrate from t = 0 to grid.t_final in grid.steps steps.

    Operators are reassembled at every t_{k+1/2}; "average iterations" is the
    mean over time levels of the per-level mean over line systems.
    """
    config = config or MultigridConfig()
    _check_inputs(problem, grid, scheme)
    stepper = stepper_for(scheme, config)

    u = problem.sample_initial(grid)
    per_step = []
    line_systems = 0
    start = time.time()
    for k in range(grid.steps):
        t_half = grid.time(k + 0.5)
        systems = build_step_systems(problem, grid, t_half, config)
        forcing = forcing_at(problem, grid, t_half)
        u, report = stepper.step(u, systems, forcing, grid.dt, time_index=k)
        per_step.append(report.line_iterations / report.line_systems)
        line_systems += report.line_systems

    wall = time.time() - start
    summary = RunReport(
        scheme=scheme,
        steps=grid.steps,
        average_iterations=float(np.mean(per_step)),
        wall_seconds=wall,
        line_systems=line_systems,
        iterations_per_step=per_step,
    )
    logger.info(
        "Run finished",
        problem=problem.describe(),
        scheme=scheme.value,
        shape=list(grid.interior_shape),
        steps=grid.steps,
        average_iterations=round(summary.average_iterations, 3),
        wall_seconds=round(wall, 4),
    )
    return SolutionField(values=u, time_index=grid.steps, time=grid.time(grid.steps)), summary
