"""
Douglas alternating-direction splitting in any dimension.

Sweep 1:  (I - A_1) U^(1) = (I + A_1 + 2 sum_{j>1} A_j) U^k + dt F
Sweep j:  (I - A_j) U^(j) = U^(j-1) - A_j U^k,   U^{k+1} = U^(d)
"""
from typing import List, Sequence, Tuple

import numpy as np

from src.models import MultigridConfig, SchemeKind, SolveStats, StepReport
from src.solvers.multigrid import MultigridHierarchy
from src.steppers.base import LODStepper, apply_operator, shift_operator


class DouglasStepper(LODStepper):
    """D-AD scheme; with a single direction it is the Crank-Nicolson step."""

    def __init__(self, scheme: SchemeKind, config: MultigridConfig = None):
        super().__init__(config)
        self.scheme = scheme

    def sweeps(
        self,
        u: np.ndarray,
        systems: Sequence[MultigridHierarchy],
        forcing: np.ndarray,
        dt: float,
    ) -> Tuple[np.ndarray, List[SolveStats]]:
        applied = [apply_operator(hier, u) for hier in systems[1:]]

        rhs = shift_operator(systems[0], u) + dt * forcing
        for a_u in applied:
            rhs = rhs + 2.0 * a_u

        stats = []
        current, first = self.line_solve(systems[0], u, rhs)
        stats.append(first)
        for hier, a_u in zip(systems[1:], applied):
            current, sweep = self.line_solve(hier, current, current - a_u)
            stats.append(sweep)
        return current, stats


def dad_step(
    u: np.ndarray,
    systems: Sequence[MultigridHierarchy],
    forcing: np.ndarray,
    dt: float,
    config: MultigridConfig = None,
    time_index: int = 0,
) -> Tuple[np.ndarray, StepReport]:
    scheme = {2: SchemeKind.DAD_2D, 3: SchemeKind.DAD_3D}.get(len(systems), SchemeKind.CN_1D)
    return DouglasStepper(scheme, config).step(u, systems, forcing, dt, time_index)


def dad_step_2d(
    u: np.ndarray,
    x_system: MultigridHierarchy,
    y_system: MultigridHierarchy,
    forcing: np.ndarray,
    dt: float,
    config: MultigridConfig = None,
    time_index: int = 0,
) -> Tuple[np.ndarray, StepReport]:
    """x-lines first, then y-lines."""
    return DouglasStepper(SchemeKind.DAD_2D, config).step(
        u, [x_system, y_system], forcing, dt, time_index
    )


def dad_step_3d(
    u: np.ndarray,
    x_system: MultigridHierarchy,
    y_system: MultigridHierarchy,
    z_system: MultigridHierarchy,
    forcing: np.ndarray,
    dt: float,
    config: MultigridConfig = None,
    time_index: int = 0,
) -> Tuple[np.ndarray, StepReport]:
    return DouglasStepper(SchemeKind.DAD_3D, config).step(
        u, [x_system, y_system, z_system], forcing, dt, time_index
    )
