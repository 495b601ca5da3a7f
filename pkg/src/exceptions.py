"""
Exception types raised by the solver library.
"""
from typing import List, Optional, Sequence


class FractionalDiffusionError(Exception):
    """Base class for solver errors."""


class DomainError(FractionalDiffusionError, ValueError):
    """An input lies outside the domain an operation is defined on."""


class ShapeMismatchError(DomainError):
    """A vector or field does not match the shape an operator expects."""


class SolverDivergenceError(FractionalDiffusionError, RuntimeError):
    """Multigrid hit its iteration cap before reaching the tolerance."""

    def __init__(
        self,
        message: str,
        residual_history: Sequence[float],
        iterations: int,
        unconverged_lines: Optional[Sequence[int]] = None,
        axis: Optional[str] = None,
    ):
        super().__init__(message)
        self.residual_history: List[float] = list(residual_history)
        self.iterations = iterations
        self.unconverged_lines: List[int] = list(unconverged_lines or [])
        self.axis = axis

    def with_axis(self, axis: str) -> "SolverDivergenceError":
        """Copy of this error tagged with the sweep axis it came from."""
        lines = self.unconverged_lines[:10]
        message = f"{self.args[0]} (sweep along {axis}, lines {lines})"
        return SolverDivergenceError(
            message,
            self.residual_history,
            self.iterations,
            self.unconverged_lines,
            axis=axis,
        )
