"""
Peaceman-Rachford splitting in 2D:

    (I - A_x) U*      = (I + A_y) U^k + (dt / 2) F
    (I - A_y) U^{k+1} = (I + A_x) U*  + (dt / 2) F
"""
from typing import List, Sequence, Tuple

import numpy as np

from src.models import MultigridConfig, SchemeKind, SolveStats, StepReport
from src.solvers.multigrid import MultigridHierarchy
from src.steppers.base import LODStepper, shift_operator


class PeacemanRachfordStepper(LODStepper):
    scheme = SchemeKind.PRAD_2D

    def sweeps(
        self,
        u: np.ndarray,
        systems: Sequence[MultigridHierarchy],
        forcing: np.ndarray,
        dt: float,
    ) -> Tuple[np.ndarray, List[SolveStats]]:
        x_system, y_system = systems
        half_forcing = 0.5 * dt * forcing

        rhs = shift_operator(y_system, u) + half_forcing
        u_star, x_stats = self.line_solve(x_system, u, rhs)

        rhs = shift_operator(x_system, u_star) + half_forcing
        u_next, y_stats = self.line_solve(y_system, u_star, rhs)
        return u_next, [x_stats, y_stats]


def prad_step_2d(
    u: np.ndarray,
    x_system: MultigridHierarchy,
    y_system: MultigridHierarchy,
    forcing: np.ndarray,
    dt: float,
    config: MultigridConfig = None,
    time_index: int = 0,
) -> Tuple[np.ndarray, StepReport]:
    return PeacemanRachfordStepper(config).step(u, [x_system, y_system], forcing, dt, time_index)
