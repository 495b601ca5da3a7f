"""
Crank-Nicolson step in 1D: (I - A) U^{k+1} = (I + A) U^k + dt F.
"""
from typing import List, Sequence, Tuple

import numpy as np

from src.models import MultigridConfig, SchemeKind, SolveStats, StepReport
from src.solvers.multigrid import MultigridHierarchy
from src.steppers.base import LODStepper, shift_operator


class CrankNicolsonStepper(LODStepper):
    scheme = SchemeKind.CN_1D

    def sweeps(
        self,
        u: np.ndarray,
        systems: Sequence[MultigridHierarchy],
        forcing: np.ndarray,
        dt: float,
    ) -> Tuple[np.ndarray, List[SolveStats]]:
        (system,) = systems
        rhs = shift_operator(system, u) + dt * forcing
        u_next, stats = self.line_solve(system, u, rhs)
        return u_next, [stats]


def cn_step_1d(
    u: np.ndarray,
    system: MultigridHierarchy,
    forcing: np.ndarray,
    dt: float,
    config: MultigridConfig = None,
    time_index: int = 0,
) -> Tuple[np.ndarray, StepReport]:
    return CrankNicolsonStepper(config).step(u, [system], forcing, dt, time_index)
