"""
Configuration management for convergence studies.
"""
from pathlib import Path
from typing import Any, List, Optional, Tuple

from dotenv import dotenv_values
from pydantic import Field, field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from src.models import MultigridConfig, ProblemKind, SchemeChoice, SchemeKind, SmootherConfig

DIMENSIONS = {ProblemKind.ONE_D: 1, ProblemKind.TWO_D: 2, ProblemKind.THREE_D: 3}


class RunConfig(BaseSettings):
    """Study settings: built-in defaults, then FRACDIFF_* environment
    variables, then a flat key=value file, then explicit overrides."""

    model_config = SettingsConfigDict(
        env_prefix="FRACDIFF_",
        case_sensitive=False,
        extra="forbid",
    )

    # Problem
    problem: ProblemKind = ProblemKind.ONE_D
    alpha: float = 1.1
    beta: float = 1.1
    gamma: float = 1.1
    custom_problem: Optional[str] = None

    # Discretization
    scheme: Optional[SchemeChoice] = None
    kmin: int = 5
    kmax: int = 8
    t_final: float = Field(default=1.0, gt=0.0)
    time_steps: Optional[int] = Field(default=None, ge=1)

    # Multigrid
    tol: float = 1e-7
    omega_pre: float = 1.0
    omega_post: float = 0.5
    nu1: int = 1
    nu2: int = 1
    coarsest_size: int = 7
    max_iterations: int = Field(default=100, ge=1)

    # Output
    out: Optional[Path] = None
    plot: Optional[Path] = None
    log_level: str = "INFO"
    json_logs: bool = False

    @field_validator("alpha", "beta", "gamma")
    @classmethod
    def _open_order(cls, value: float) -> float:
        if not 1.0 < value < 2.0:
            raise ValueError(f"Fractional orders must lie in (1, 2), got {value}")
        return value

    @field_validator("kmin")
    @classmethod
    def _kmin_floor(cls, value: int) -> int:
        if value < 3:
            raise ValueError(f"kmin must be at least 3 (N = 8), got {value}")
        return value

    @field_validator("tol")
    @classmethod
    def _tol_window(cls, value: float) -> float:
        if not 0.0 < value < 1.0:
            raise ValueError(f"tol must lie in (0, 1), got {value}")
        return value

    @field_validator("log_level")
    @classmethod
    def _known_level(cls, value: str) -> str:
        level = value.upper()
        if level not in {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}:
            raise ValueError(f"Unknown log level '{value}'")
        return level

    @model_validator(mode="after")
    def _consistent(self) -> "RunConfig":
        if self.kmin > self.kmax:
            raise ValueError(f"kmin ({self.kmin}) must not exceed kmax ({self.kmax})")
        # raises on bad omegas, sweep counts and coarsest size
        self.multigrid_config()
        if self.problem == ProblemKind.CUSTOM:
            if not self.custom_problem:
                raise ValueError("problem=custom requires custom_problem = 'module:callable'")
        else:
            self.scheme_kind(self.dimension)
        return self

    @classmethod
    def load(cls, path: Optional[Path] = None, **overrides: Any) -> "RunConfig":
        """Read a key=value file (keys mirror the CLI flags with '-' -> '_');
        overrides that are not None win over the file."""
        values = {}
        if path is not None:
            path = Path(path)
            if not path.is_file():
                raise FileNotFoundError(f"Config file not found: {path}")
            values = {k.lower(): v for k, v in dotenv_values(path).items() if v is not None}
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    @property
    def dimension(self) -> Optional[int]:
        """Problem dimension; None for custom problems until they are loaded."""
        return DIMENSIONS.get(self.problem)

    @property
    def orders(self) -> Tuple[float, ...]:
        return (self.alpha, self.beta, self.gamma)[:self.dimension or 3]

    @property
    def exponents(self) -> List[int]:
        return list(range(self.kmin, self.kmax + 1))

    def scheme_kind(self, dimension: int) -> SchemeKind:
        choice = self.scheme or SchemeChoice.default_for(dimension)
        return choice.resolve(dimension)

    def multigrid_config(self) -> MultigridConfig:
        return MultigridConfig(
            smoother=SmootherConfig(
                omega_pre=self.omega_pre,
                omega_post=self.omega_post,
                nu1=self.nu1,
                nu2=self.nu2,
            ),
            tol=self.tol,
            max_iterations=self.max_iterations,
            coarsest_size=self.coarsest_size,
        )

