"""
Study Orchestrator - Runs convergence studies row by row.
"""
import math
import time
from typing import List, Optional, Sequence

import numpy as np

from src.config import RunConfig
from src.discretization.grid import GridSpec
from src.exceptions import DomainError, SolverDivergenceError
from src.models import (
    Axis,
    BenchmarkPoint,
    ConvergenceRow,
    ProblemKind,
    RowResult,
    SmootherConfig,
    StudyReport,
)
from src.problems.base import ManufacturedProblem
from src.problems.manufactured import load_custom_problem, problem_1d, problem_2d, problem_3d
from src.solvers.multigrid import MultigridHierarchy, operator_storage_bytes, v_cycle
from src.solvers.toeplitz import clear_spectrum_cache
from src.steppers.driver import run
from src.utils.logger import LogContext, get_logger

logger = get_logger(__name__)


def observed_rate(n_prev: int, e_prev: float, n: int, e: float) -> Optional[float]:
    """log(e_prev / e) / log(n / n_prev); None when either error is unusable."""
    if not (e_prev > 0 and e > 0) or math.isnan(e_prev) or math.isnan(e):
        return None
    return math.log(e_prev / e) / math.log(n / n_prev)


class StudyOrchestrator:
    """Runs one problem/scheme over a range of grid sizes N = 2^k."""

    def __init__(self, config: RunConfig, problem: Optional[ManufacturedProblem] = None):
        self.config = config
        self.problem = problem or self._initialize_problem()
        try:
            self.scheme = config.scheme_kind(self.problem.dimension)
        except ValueError as e:
            raise DomainError(str(e)) from e
        self.multigrid = config.multigrid_config()

        logger.info(
            "StudyOrchestrator initialized",
            problem=self.problem.describe(),
            scheme=self.scheme.value,
            exponents=config.exponents,
        )

    def _initialize_problem(self) -> ManufacturedProblem:
        """Build the problem named by the configuration."""
        cfg = self.config
        if cfg.problem == ProblemKind.ONE_D:
            return problem_1d(cfg.alpha)
        elif cfg.problem == ProblemKind.TWO_D:
            return problem_2d(cfg.alpha, cfg.beta)
        elif cfg.problem == ProblemKind.THREE_D:
            return problem_3d(cfg.alpha, cfg.beta, cfg.gamma)
        else:
            return load_custom_problem(cfg.custom_problem)

    def run_row(self, cells: int) -> RowResult:
        """Solve on an N = cells grid and measure the max-norm error at t_final."""
        start_time = time.time()

        with LogContext(problem=self.problem.describe(), scheme=self.scheme.value, N=cells):
            logger.info("Row started")
            try:
                grid = self.problem.make_grid(cells, self.config.time_steps or cells)
                if self.config.t_final != self.problem.t_final:
                    grid = grid.model_copy(update={"t_final": self.config.t_final})

                field, report = run(self.problem, grid, self.scheme, self.multigrid)

                exact = self.problem.sample_exact(grid, field.time)
                error = math.nan if exact is None else float(np.max(np.abs(field.values - exact)))

                row = ConvergenceRow(
                    N=cells,
                    max_error=error,
                    avg_iter=report.average_iterations,
                    cpu_seconds=report.wall_seconds,
                )
                logger.info("Row finished", max_error=error, avg_iter=row.avg_iter)
                return RowResult(
                    N=cells,
                    success=True,
                    row=row,
                    metadata={"steps": grid.steps, "line_systems": report.line_systems},
                    execution_time_ms=(time.time() - start_time) * 1000,
                )

            except Exception as e:
                metadata = {"error_type": type(e).__name__}
                if isinstance(e, SolverDivergenceError):
                    metadata.update(
                        axis=e.axis,
                        iterations=e.iterations,
                        unconverged_lines=e.unconverged_lines[:10],
                    )
                logger.error("Row failed", error=str(e), **metadata)
                return RowResult(
                    N=cells,
                    success=False,
                    error=str(e),
                    metadata=metadata,
                    execution_time_ms=(time.time() - start_time) * 1000,
                )

    def run(self) -> StudyReport:
        """All rows in increasing N; a failed row blanks the next row's rate."""
        report = StudyReport()
        previous: Optional[ConvergenceRow] = None

        for k in self.config.exponents:
            result = self.run_row(2 ** k)
            if not result.success:
                report.failures.append(result)
                previous = None
                continue

            row = result.row
            if previous is not None:
                row = row.model_copy(update={
                    "rate": observed_rate(previous.N, previous.max_error, row.N, row.max_error),
                })
            report.rows.append(row)
            previous = row

        clear_spectrum_cache()
        logger.info("Study finished", rows=len(report.rows), failures=len(report.failures))
        return report


def run_study(cfg: RunConfig) -> List[ConvergenceRow]:
    """Convergence rows of the configured study (failed rows are omitted)."""
    return StudyOrchestrator(cfg).run().rows


def benchmark_v_cycle(
    exponents: Sequence[int],
    nu: float = 1.5,
    repeats: int = 3,
    coarsest_size: int = 7,
    seed: int = 0,
) -> List[BenchmarkPoint]:
    """Best-of-`repeats` time of one 1D V-cycle at N = 2^k, plus operator storage."""
    rng = np.random.default_rng(seed)
    smoother = SmootherConfig()
    points = []
    for k in exponents:
        cells = 2 ** k
        grid = GridSpec.uniform(1, cells)
        hier = MultigridHierarchy.build(
            grid, Axis.X, nu, lambda x, y, z, t: 1.0, 0.5 * grid.dt, coarsest_size=coarsest_size,
        )
        f = rng.standard_normal(cells - 1)
        u0 = np.zeros(cells - 1)

        best = math.inf
        for _ in range(repeats):
            start = time.perf_counter()
            v_cycle(hier, u0, f, smoother)
            best = min(best, time.perf_counter() - start)

        point = BenchmarkPoint(N=cells, seconds=best, storage_bytes=operator_storage_bytes(hier))
        logger.info("V-cycle timed", N=cells, seconds=best, storage_bytes=point.storage_bytes)
        points.append(point)
    return points
