"""
Unit tests for the line multigrid solver.
"""
import numpy as np
import pytest
from pydantic import ValidationError

from src.discretization.grid import GridSpec
from src.discretization.operators import apply_shifted, build_directional_operator, to_lines
from src.exceptions import DomainError, ShapeMismatchError, SolverDivergenceError
from src.models import Axis, MultigridConfig, SmootherConfig, SolveStats
from src.solvers.multigrid import (
    RESIDUAL_FLOOR,
    MultigridHierarchy,
    operator_storage_bytes,
    prolong,
    restrict,
    solve,
    solve_field,
    v_cycle,
    weighted_jacobi,
)
from src.solvers.toeplitz import ToeplitzWorkspace
from tests.oracles import dense_directional


def one(x, y, z, t):
    return np.ones_like(x)


def zero(x, y, z, t):
    return np.zeros_like(x)


def variable(x, y, z, t):
    return x ** 1.5 + 0.2 + t


def _hierarchy(cells: int, nu: float = 1.5, coeff=one, t_half: float = 0.0, dimension: int = 1, **kwargs):
    grid = GridSpec.uniform(dimension, cells)
    return grid, MultigridHierarchy.build(grid, Axis.X, nu, coeff, t_half, **kwargs)


class TestTransfers:
    """Tests for restrict and prolong."""

    def test_restrict_examples(self):
        """(0, 1, 0) -> 0.5 and a 7 -> 3 example."""
        np.testing.assert_allclose(restrict(np.array([0.0, 1.0, 0.0])), [0.5])
        np.testing.assert_allclose(restrict(np.arange(1.0, 8.0)), [2.0, 4.0, 6.0])

    def test_prolong_example(self):
        """(1) -> (0.5, 1, 0.5)."""
        np.testing.assert_allclose(prolong(np.array([1.0])), [0.5, 1.0, 0.5])

    def test_prolong_is_twice_restrict_transpose(self):
        """<P w, v> = 2 <w, R v> for random vectors."""
        rng = np.random.default_rng(0)
        v = rng.standard_normal(31)
        w = rng.standard_normal(15)
        assert np.dot(prolong(w), v) == pytest.approx(2.0 * np.dot(w, restrict(v)), rel=1e-12)

    def test_batched_last_axis(self):
        """Leading axes are carried through."""
        lines = np.random.default_rng(1).standard_normal((4, 15))
        np.testing.assert_allclose(restrict(lines)[2], restrict(lines[2]))
        assert prolong(restrict(lines)).shape == (4, 15)

    def test_restrict_rejects_even(self):
        """Even fine lengths have no coarse grid."""
        with pytest.raises(DomainError):
            restrict(np.ones(8))


class TestHierarchy:
    """Tests for MultigridHierarchy.build."""

    def test_level_sizes(self):
        """63 -> 31 -> 15 -> 7 with the direct solve at 7."""
        _, hier = _hierarchy(64)
        assert [level.n for level in hier.levels] == [63, 31, 15, 7]
        assert hier.levels[-1].coarse_inverse is not None
        assert all(level.coarse_inverse is None for level in hier.levels[:-1])

    def test_coarse_levels_are_rediscretized(self):
        """Each coarse operator equals a direct assembly on the coarse grid."""
        grid, hier = _hierarchy(32, nu=1.3, coeff=variable, t_half=0.25)
        coarse = build_directional_operator(grid.coarsen(Axis.X), Axis.X, 1.3, variable, 0.25)
        np.testing.assert_allclose(hier.levels[1].operator.xi, coarse.xi, rtol=1e-15)
        np.testing.assert_allclose(hier.levels[1].operator.toeplitz.first_column, coarse.toeplitz.first_column)

    def test_levels_own_workspaces(self):
        """Every level carries a scratch buffer sized for all of its lines."""
        _, hier = _hierarchy(32, dimension=2)
        for level in hier.levels:
            assert level.workspace.batch_shape == (31,)
            assert level.workspace.buffer.shape == (31, 2 * level.n)
        assert len({id(level.workspace.buffer) for level in hier.levels}) == hier.depth

    def test_rejects_non_dyadic(self):
        """Interior sizes must be 2^k - 1."""
        with pytest.raises(DomainError):
            MultigridHierarchy.build(GridSpec.uniform(1, 12), Axis.X, 1.5, one, 0.0)

    def test_storage_grows_linearly(self):
        """Doubling N roughly doubles the stored bytes."""
        sizes = [operator_storage_bytes(_hierarchy(2 ** k)[1]) for k in (8, 9, 10, 11)]
        for small, large in zip(sizes, sizes[1:]):
            assert large / small <= 2.2


class TestJacobi:
    """Tests for weighted_jacobi."""

    def test_identity_system(self):
        """With A = 0 one undamped sweep is exact."""
        _, hier = _hierarchy(16, coeff=zero)
        f = np.random.default_rng(2).standard_normal((1, 15))
        u = weighted_jacobi(hier.finest, np.zeros_like(f), f, 1.0, 1)
        np.testing.assert_allclose(u, f)

    def test_zero_sweeps(self):
        """Zero sweeps leave u unchanged; negative sweeps are rejected."""
        _, hier = _hierarchy(16)
        u = np.ones((1, 15))
        np.testing.assert_array_equal(weighted_jacobi(hier.finest, u, u, 0.5, 0), u)
        with pytest.raises(DomainError):
            weighted_jacobi(hier.finest, u, u, 0.5, -1)

    def test_reduces_residual(self):
        """Damped sweeps shrink the residual of a smooth right-hand side."""
        _, hier = _hierarchy(32)
        f = np.ones((1, 31))
        u = np.zeros_like(f)
        before = np.linalg.norm(hier.finest.residual(u, f))
        after = np.linalg.norm(hier.finest.residual(weighted_jacobi(hier.finest, u, f, 0.5, 5), f))
        assert after < before


class TestVCycle:
    """Tests for v_cycle."""

    def test_zero_maps_to_zero(self):
        """f = 0 and u0 = 0 give exactly zero."""
        _, hier = _hierarchy(64)
        np.testing.assert_array_equal(v_cycle(hier, np.zeros(63), np.zeros(63)), np.zeros(63))

    def test_linear_in_f(self):
        """With u0 = 0 the cycle is linear in f."""
        _, hier = _hierarchy(64, coeff=variable)
        rng = np.random.default_rng(3)
        f, g = rng.standard_normal((2, 63))
        combined = v_cycle(hier, np.zeros(63), 2.0 * f - g)
        np.testing.assert_allclose(combined, 2.0 * v_cycle(hier, np.zeros(63), f) - v_cycle(hier, np.zeros(63), g), atol=1e-12)

    def test_exact_solution_is_fixed(self):
        """The exact solution is a fixed point up to rounding."""
        grid, hier = _hierarchy(64, coeff=variable)
        u = np.random.default_rng(4).standard_normal(63)
        f = u - dense_directional(hier.finest.operator) @ u
        np.testing.assert_allclose(v_cycle(hier, u, f), u, atol=1e-10)

    @pytest.mark.parametrize("nu", [1.1, 1.5, 1.9])
    def test_residual_contracts(self, nu):
        """One cycle from zero cuts the residual of a random f by a factor of three."""
        _, hier = _hierarchy(256, nu=nu, coeff=variable)
        f = np.random.default_rng(5).standard_normal(255)
        u = v_cycle(hier, np.zeros(255), f)
        assert np.linalg.norm(f - u + dense_directional(hier.finest.operator) @ u) <= 0.3 * np.linalg.norm(f)

    def test_coarsest_only(self):
        """A grid at the coarsest size is solved directly in one cycle."""
        _, hier = _hierarchy(8)
        f = np.random.default_rng(6).standard_normal(7)
        u = v_cycle(hier, np.zeros(7), f)
        dense = np.eye(7) - dense_directional(hier.finest.operator)
        np.testing.assert_allclose(dense @ u, f, atol=1e-12)

    def test_shape_checked(self):
        """Vectors of the wrong length are rejected."""
        _, hier = _hierarchy(16)
        with pytest.raises(ShapeMismatchError):
            v_cycle(hier, np.zeros(14), np.zeros(14))


class TestSolve:
    """Tests for solve and solve_field."""

    @pytest.mark.parametrize("nu", [1.2, 1.8])
    def test_matches_dense_solution(self, nu):
        """The multigrid answer agrees with a dense solve."""
        _, hier = _hierarchy(128, nu=nu, coeff=variable, t_half=0.5)
        f = np.random.default_rng(7).standard_normal(127)
        u, stats = solve(hier, np.zeros(127), f, MultigridConfig(tol=1e-10))
        dense = np.eye(127) - dense_directional(hier.finest.operator)
        expected = np.linalg.solve(dense, f)
        assert np.max(np.abs(u - expected)) <= 1e-8 * np.max(np.abs(expected)) * np.linalg.cond(dense)
        assert stats.converged
        assert stats.residual_history[0] == 1.0
        assert stats.residual_history[-1] < 1e-10

    def test_identity_system_one_iteration(self):
        """A = 0 converges in a single cycle."""
        _, hier = _hierarchy(16, coeff=zero)
        f = np.linspace(-1.0, 1.0, 15)
        u, stats = solve(hier, np.zeros(15), f)
        np.testing.assert_allclose(u, f, atol=1e-14)
        assert stats.iterations == 1
        assert stats.residual_history == [1.0, RESIDUAL_FLOOR]

    def test_history_must_be_positive(self):
        """SolveStats refuses zero or negative residual ratios."""
        with pytest.raises(ValidationError):
            SolveStats(iterations=1, residual_history=[1.0, 0.0])

    def test_zero_residual_takes_no_iterations(self):
        """u0 already solving the system returns immediately."""
        _, hier = _hierarchy(16, coeff=zero)
        f = np.ones(15)
        u, stats = solve(hier, f, f)
        assert stats.iterations == 0
        assert stats.residual_history == []
        np.testing.assert_array_equal(u, f)

    def test_iteration_cap_raises(self):
        """An unreachable tolerance with one allowed cycle diverges."""
        _, hier = _hierarchy(64, coeff=variable)
        f = np.random.default_rng(8).standard_normal(63)
        config = MultigridConfig(tol=1e-15, max_iterations=1)
        with pytest.raises(SolverDivergenceError) as excinfo:
            solve(hier, np.zeros(63), f, config)
        assert excinfo.value.iterations == 1
        assert excinfo.value.unconverged_lines == [0]
        assert len(excinfo.value.residual_history) == 2

    def test_lines_converge_independently(self):
        """Lines with zero data take no cycles while the rest solve."""
        grid = GridSpec.uniform(2, 32)
        hier = MultigridHierarchy.build(grid, Axis.X, 1.4, variable, 0.1)
        f = np.zeros(grid.interior_shape)
        f[:, 5] = 1.0
        u, stats = solve_field(hier, np.zeros_like(f), f, MultigridConfig(tol=1e-9))
        assert stats.line_count == 31
        assert stats.total_line_iterations == stats.iterations
        np.testing.assert_array_equal(np.delete(u, 5, axis=1), 0.0)

        op = hier.finest.operator
        residual = f - apply_shifted(op, u, -1)
        assert np.linalg.norm(residual[:, 5]) < 1e-9 * np.linalg.norm(f[:, 5])

    def test_matvecs_use_level_buffers(self, monkeypatch):
        """Smoothing and residuals run in the level workspaces, also on frozen-line subsets."""
        checks = []
        original = ToeplitzWorkspace.fits

        def recording(workspace, shape):
            result = original(workspace, shape)
            checks.append(result)
            return result

        monkeypatch.setattr(ToeplitzWorkspace, "fits", recording)
        grid = GridSpec.uniform(2, 32)
        hier = MultigridHierarchy.build(grid, Axis.X, 1.6, variable, 0.2)
        f = np.zeros(grid.interior_shape)
        f[:, 3] = 1.0
        f[:, 20] = np.linspace(0.0, 1e-3, 31)
        solve_field(hier, np.zeros_like(f), f, MultigridConfig(tol=1e-10))

        assert checks and all(checks)
        n = hier.finest.n
        assert np.any(hier.finest.workspace.buffer[:, :n] != 0.0)
        assert np.all(hier.finest.workspace.buffer[:, n:] == 0.0)

    def test_field_along_y(self):
        """Sweeps along y solve every y-line of the field."""
        grid = GridSpec.uniform(2, 16)
        hier = MultigridHierarchy.build(grid, Axis.Y, 1.7, variable, 0.3)
        f = np.random.default_rng(9).standard_normal(grid.interior_shape)
        u, stats = solve_field(hier, np.zeros_like(f), f, MultigridConfig(tol=1e-10))
        expected = np.linalg.solve(np.eye(225) - dense_directional(hier.finest.operator), f.ravel())
        np.testing.assert_allclose(u.ravel(), expected, atol=1e-8)
        assert stats.average_iterations <= stats.iterations
        assert to_lines(u, 1).shape == (15, 15)

    def test_divergence_tagged_with_axis(self):
        """solve_field reports the sweep axis."""
        grid = GridSpec.uniform(2, 16)
        hier = MultigridHierarchy.build(grid, Axis.Y, 1.7, variable, 0.3)
        f = np.ones(grid.interior_shape)
        config = MultigridConfig(tol=1e-15, max_iterations=1, smoother=SmootherConfig(omega_pre=0.2, omega_post=0.2))
        with pytest.raises(SolverDivergenceError) as excinfo:
            solve_field(hier, np.zeros_like(f), f, config)
        assert excinfo.value.axis == "y"

    @pytest.mark.parametrize("nu", [1.1, 1.5, 1.9])
    def test_iterations_bounded_in_n(self, nu):
        """Iteration counts stay flat as the grid is refined."""
        counts = []
        for cells in (64, 256, 1024):
            _, hier = _hierarchy(cells, nu=nu, coeff=variable, t_half=0.5)
            f = np.ones(cells - 1)
            _, stats = solve(hier, np.zeros(cells - 1), f)
            counts.append(stats.iterations)
        assert max(counts) <= 10
        assert counts[-1] <= counts[0] + 2


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
