"""
Data models for the fractional diffusion solver.
"""
import math
from enum import Enum
from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class Axis(str, Enum):
    """Spatial directions."""
    X = "x"
    Y = "y"
    Z = "z"

    @property
    def index(self) -> int:
        return "xyz".index(self.value)

    @classmethod
    def from_index(cls, index: int) -> "Axis":
        return list(cls)[index]


class Side(str, Enum):
    """Which end of an interval a one-sided derivative integrates from."""
    LEFT = "left"
    RIGHT = "right"


class SchemeKind(str, Enum):
    """Time-stepping schemes."""
    CN_1D = "cn_1d"
    DAD_2D = "dad_2d"
    PRAD_2D = "prad_2d"
    DAD_3D = "dad_3d"

    @property
    def dimension(self) -> int:
        return int(self.value[-2])


class SchemeChoice(str, Enum):
    """Scheme selector as written on the command line."""
    CN = "cn"
    DAD = "dad"
    PRAD = "prad"

    def resolve(self, dimension: int) -> SchemeKind:
        """Map the selector onto the scheme for a problem dimension."""
        table = {
            (SchemeChoice.CN, 1): SchemeKind.CN_1D,
            (SchemeChoice.DAD, 2): SchemeKind.DAD_2D,
            (SchemeChoice.PRAD, 2): SchemeKind.PRAD_2D,
            (SchemeChoice.DAD, 3): SchemeKind.DAD_3D,
        }
        try:
            return table[(self, dimension)]
        except KeyError:
            raise ValueError(f"Scheme '{self.value}' is not available in {dimension}D") from None

    @classmethod
    def default_for(cls, dimension: int) -> "SchemeChoice":
        return cls.CN if dimension == 1 else cls.DAD


class ProblemKind(str, Enum):
    """Problem selectors understood by the harness."""
    ONE_D = "1d"
    TWO_D = "2d"
    THREE_D = "3d"
    CUSTOM = "custom"


class CoarseOperator(str, Enum):
    """How a two-grid coarse operator is formed."""
    GALERKIN = "galerkin"
    REDISCRETIZED = "rediscretized"


def is_dyadic_minus_one(n: int) -> bool:
    """True when n = 2^j - 1 for some j >= 1."""
    return n >= 1 and ((n + 1) & n) == 0


class SmootherConfig(BaseModel):
    """Weighted Jacobi parameters for pre- and post-smoothing."""
    model_config = ConfigDict(frozen=True)

    omega_pre: float = 1.0
    omega_post: float = 0.5
    nu1: int = Field(default=1, ge=0)
    nu2: int = Field(default=1, ge=0)

    @field_validator("omega_pre", "omega_post")
    @classmethod
    def _omega_window(cls, value: float) -> float:
        if not 0.0 < value <= 1.0:
            raise ValueError(f"Jacobi weight must lie in (0, 1], got {value}")
        return value

    @model_validator(mode="after")
    def _some_smoothing(self) -> "SmootherConfig":
        if self.nu1 == 0 and self.nu2 == 0:
            raise ValueError("At least one of nu1, nu2 must be positive")
        return self


class MultigridConfig(BaseModel):
    """Solver settings shared by every line system."""
    model_config = ConfigDict(frozen=True)

    smoother: SmootherConfig = Field(default_factory=SmootherConfig)
    tol: float = Field(default=1e-7, gt=0.0, lt=1.0)
    max_iterations: int = Field(default=100, ge=1)
    coarsest_size: int = 7

    @field_validator("coarsest_size")
    @classmethod
    def _coarsest_dyadic(cls, value: int) -> int:
        if value < 3 or not is_dyadic_minus_one(value):
            raise ValueError(f"coarsest_size must be 2^j - 1 with j >= 2, got {value}")
        return value


class SolveStats(BaseModel):
    """Outcome of one batched multigrid solve (all lines of a sweep)."""
    iterations: int
    line_count: int = 1
    total_line_iterations: int = 0
    residual_history: List[float] = Field(default_factory=list)
    converged: bool = True

    @field_validator("residual_history")
    @classmethod
    def _strictly_positive(cls, history: List[float]) -> List[float]:
        if any(not value > 0 for value in history):
            raise ValueError("Residual history entries must be strictly positive")
        return history

    @property
    def average_iterations(self) -> float:
        if self.line_count == 0:
            return 0.0
        return self.total_line_iterations / self.line_count


class StepReport(BaseModel):
    """Per-direction solve statistics of one time step."""
    scheme: SchemeKind
    time_index: int
    directions: List[SolveStats]
    wall_seconds: float = 0.0

    @model_validator(mode="after")
    def _one_entry_per_direction(self) -> "StepReport":
        if len(self.directions) != self.scheme.dimension:
            raise ValueError(
                f"{self.scheme.value} needs {self.scheme.dimension} sweeps, "
                f"got {len(self.directions)}"
            )
        return self

    @property
    def line_systems(self) -> int:
        return sum(d.line_count for d in self.directions)

    @property
    def line_iterations(self) -> int:
        return sum(d.total_line_iterations for d in self.directions)


class SolutionField(BaseModel):
    """Interior values of the numerical solution at time level k."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    values: np.ndarray
    time_index: int
    time: float

    @field_validator("values")
    @classmethod
    def _finite(cls, values: np.ndarray) -> np.ndarray:
        if not np.all(np.isfinite(values)):
            raise ValueError("Solution field contains non-finite entries")
        return values


class RunReport(BaseModel):
    """Aggregate statistics of a full time integration."""
    scheme: SchemeKind
    steps: int
    average_iterations: float
    wall_seconds: float
    line_systems: int = 0
    iterations_per_step: List[float] = Field(default_factory=list)


class ConvergenceRow(BaseModel):
    """One row of a convergence table."""
    N: int
    max_error: float
    rate: Optional[float] = None
    avg_iter: float
    cpu_seconds: float

    @field_validator("max_error")
    @classmethod
    def _non_negative(cls, value: float) -> float:
        if not math.isnan(value) and value < 0:
            raise ValueError("max_error must be non-negative")
        return value


class RowResult(BaseModel):
    """Result of running one grid size of a study."""
    N: int
    success: bool
    row: Optional[ConvergenceRow] = None
    error: Optional[str] = None
    metadata: Dict[str, Any] = Field(default_factory=dict)
    execution_time_ms: float = 0


class StudyReport(BaseModel):
    """All rows of a study, successful and failed."""
    rows: List[ConvergenceRow] = Field(default_factory=list)
    failures: List[RowResult] = Field(default_factory=list)

    @property
    def succeeded(self) -> bool:
        return not self.failures


class BenchmarkPoint(BaseModel):
    """Timing and storage of one V-cycle at a given grid size."""
    N: int
    seconds: float
    storage_bytes: int


class TwoGridAnalysis(BaseModel):
    """Dense two-grid diagnostics of a constant-coefficient line operator."""
    n: int
    omega: float
    coarse: CoarseOperator
    eta0: float
    sigma: float
    bound: float
    measured_factor: float
    exact_norm: float
