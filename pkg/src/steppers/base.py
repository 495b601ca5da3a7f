"""
Base interface for locally one-dimensional time steppers.
"""
import time
from abc import ABC, abstractmethod
from typing import List, Sequence, Tuple

import numpy as np

from src.discretization.grid import GridSpec
from src.discretization.operators import DirectionalOperator, apply, apply_shifted
from src.exceptions import DomainError
from src.models import MultigridConfig, SchemeKind, SolveStats, StepReport
from src.problems.base import ManufacturedProblem
from src.solvers.multigrid import MultigridHierarchy, solve_field
from src.utils.logger import get_logger

logger = get_logger(__name__)


def build_step_systems(
    problem: ManufacturedProblem,
    grid: GridSpec,
    t_half: float,
    config: MultigridConfig,
) -> List[MultigridHierarchy]:
    """One hierarchy per direction, all assembled at t_{k+1/2}."""
    return [
        MultigridHierarchy.build(
            grid,
            axis,
            problem.order(axis),
            problem.coefficient(axis),
            t_half,
            coarsest_size=config.coarsest_size,
        )
        for axis in problem.axes
    ]


class LODStepper(ABC):
    """Advances U^k to U^{k+1} with one implicit line sweep per direction."""

    scheme: SchemeKind

    def __init__(self, config: MultigridConfig = None):
        self.config = config or MultigridConfig()

    @property
    def dimension(self) -> int:
        return self.scheme.dimension

    @abstractmethod
    def sweeps(
        self,
        u: np.ndarray,
        systems: Sequence[MultigridHierarchy],
        forcing: np.ndarray,
        dt: float,
    ) -> Tuple[np.ndarray, List[SolveStats]]:
        """Run the directional solves of one step."""
        pass

    def step(
        self,
        u: np.ndarray,
        systems: Sequence[MultigridHierarchy],
        forcing: np.ndarray,
        dt: float,
        time_index: int = 0,
    ) -> Tuple[np.ndarray, StepReport]:
        """One time step; `forcing` is F^{k+1/2} sampled on the interior."""
        if len(systems) != self.dimension:
            raise DomainError(
                f"{self.scheme.value} needs {self.dimension} directional systems, got {len(systems)}"
            )
        for hier in systems:
            hier.finest.operator.check_field(u)
            hier.finest.operator.check_field(forcing)

        start = time.time()
        u_next, stats = self.sweeps(u, systems, forcing, dt)
        report = StepReport(
            scheme=self.scheme,
            time_index=time_index,
            directions=stats,
            wall_seconds=time.time() - start,
        )
        logger.debug(
            "Time step finished",
            scheme=self.scheme.value,
            k=time_index,
            iterations=[s.iterations for s in stats],
            wall_ms=report.wall_seconds * 1000,
        )
        return u_next, report

    def line_solve(
        self,
        hier: MultigridHierarchy,
        guess: np.ndarray,
        rhs: np.ndarray,
    ) -> Tuple[np.ndarray, SolveStats]:
        return solve_field(hier, guess, rhs, self.config)


def operator_of(hier: MultigridHierarchy) -> DirectionalOperator:
    return hier.finest.operator


def apply_operator(hier: MultigridHierarchy, u: np.ndarray) -> np.ndarray:
    """A u with the finest operator of a hierarchy, reusing its FFT buffer."""
    return apply(operator_of(hier), u, hier.finest.workspace)


def shift_operator(hier: MultigridHierarchy, u: np.ndarray, sign: int = 1) -> np.ndarray:
    """(I + sign A) u with the finest operator of a hierarchy."""
    return apply_shifted(operator_of(hier), u, sign, hier.finest.workspace)
