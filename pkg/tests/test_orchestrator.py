"""
Unit tests for convergence studies and the V-cycle benchmark.
"""
import math

import numpy as np
import pytest

from src.config import RunConfig
from src.exceptions import DomainError
from src.models import RowResult
from src.orchestrator import StudyOrchestrator, benchmark_v_cycle, observed_rate, run_study
from src.problems.manufactured import CustomProblem
from src.solvers.toeplitz import spectrum_cache_size


def _stale_problem():
    """Zero data, so the numerical solution stays zero, with an unrelated exact field."""
    return CustomProblem(
        orders=(1.5,),
        coefficients=(lambda x, y, z, t: np.ones_like(x),),
        forcing=lambda x, y, z, t: np.zeros_like(x),
        initial=lambda x, y, z: np.zeros_like(x),
        exact=lambda x, y, z, t: np.exp(-t) * np.sin(np.pi * x),
    )


class TestObservedRate:
    """Tests for observed_rate."""

    def test_second_order(self):
        """Quartering the error on a doubled grid is rate 2."""
        assert observed_rate(32, 4e-4, 64, 1e-4) == pytest.approx(2.0)

    def test_first_one_dimensional_rate(self):
        """The first 1D rate at alpha = 1.1."""
        assert observed_rate(32, 7.8755e-5, 64, 2.1801e-5) == pytest.approx(1.8530, abs=1e-4)

    def test_unusable_errors(self):
        """Zero or NaN errors give no rate."""
        assert observed_rate(8, 0.0, 16, 1e-3) is None
        assert observed_rate(8, 1e-3, 16, math.nan) is None


class TestStudyOrchestrator:
    """Tests for StudyOrchestrator."""

    def test_rows_and_rates(self):
        """Rows come in increasing N, only later rows carry a rate, and cached spectra are released."""
        cfg = RunConfig(problem="1d", alpha=1.5, kmin=4, kmax=6)
        report = StudyOrchestrator(cfg).run()
        assert report.succeeded
        assert [row.N for row in report.rows] == [16, 32, 64]
        assert report.rows[0].rate is None
        for row in report.rows[1:]:
            assert 1.5 <= row.rate <= 2.5
        assert all(row.max_error > 0 and row.cpu_seconds >= 0 for row in report.rows)
        assert spectrum_cache_size() == 0

    def test_error_plumbing(self):
        """A solution stuck at zero has error max |exact| at t = 1."""
        cfg = RunConfig(problem="custom", custom_problem="unused:factory", kmin=4, kmax=4)
        orchestrator = StudyOrchestrator(cfg, problem=_stale_problem())
        result = orchestrator.run_row(16)
        assert result.success
        x = np.arange(1, 16) / 16
        assert result.row.max_error == pytest.approx(np.max(np.exp(-1.0) * np.sin(np.pi * x)), rel=1e-14)
        assert result.row.avg_iter == 0.0

    def test_missing_exact_gives_nan(self):
        """Without an exact solution the error is NaN."""
        problem = CustomProblem(
            orders=(1.5,),
            coefficients=(lambda x, y, z, t: np.ones_like(x),),
            forcing=lambda x, y, z, t: np.ones_like(x),
            initial=lambda x, y, z: np.zeros_like(x),
        )
        cfg = RunConfig(problem="custom", custom_problem="unused:factory", kmin=4, kmax=5)
        report = StudyOrchestrator(cfg, problem=problem).run()
        assert all(math.isnan(row.max_error) for row in report.rows)
        assert report.rows[1].rate is None

    def test_failed_rows_are_reported(self):
        """Non-convergence fails every row without stopping the study."""
        cfg = RunConfig(problem="1d", kmin=4, kmax=5, tol=1e-15, max_iterations=1)
        report = StudyOrchestrator(cfg).run()
        assert not report.succeeded
        assert report.rows == []
        assert [f.N for f in report.failures] == [16, 32]
        failure = report.failures[0]
        assert failure.metadata["error_type"] == "SolverDivergenceError"
        assert failure.metadata["axis"] == "x"
        assert failure.metadata["iterations"] == 1

    def test_failure_blanks_next_rate(self, monkeypatch):
        """A failed row leaves a gap; the row after it has no rate."""
        cfg = RunConfig(problem="1d", alpha=1.5, kmin=4, kmax=6)
        orchestrator = StudyOrchestrator(cfg)
        original = orchestrator.run_row

        def flaky(cells):
            if cells == 32:
                return RowResult(N=cells, success=False, error="injected")
            return original(cells)

        monkeypatch.setattr(orchestrator, "run_row", flaky)
        report = orchestrator.run()
        assert [row.N for row in report.rows] == [16, 64]
        assert report.rows[1].rate is None
        assert [f.N for f in report.failures] == [32]

    def test_scheme_mismatch(self):
        """A 2D-only scheme for a 1D custom problem is rejected up front."""
        cfg = RunConfig(problem="custom", custom_problem="unused:factory", scheme="prad")
        with pytest.raises(DomainError):
            StudyOrchestrator(cfg, problem=_stale_problem())

    def test_custom_problem_by_path(self):
        """problem=custom loads the factory named in the config."""
        cfg = RunConfig(problem="custom", custom_problem="tests.test_problems:heat_problem", kmin=4, kmax=4)
        orchestrator = StudyOrchestrator(cfg)
        assert orchestrator.problem.dimension == 1
        assert orchestrator.scheme.value == "cn_1d"

    def test_run_study(self):
        """run_study returns just the rows."""
        rows = run_study(RunConfig(problem="2d", kmin=3, kmax=4))
        assert [row.N for row in rows] == [8, 16]


class TestBenchmark:
    """Tests for benchmark_v_cycle."""

    def test_points(self):
        """One point per exponent with growing storage."""
        points = benchmark_v_cycle([5, 6, 7], repeats=1)
        assert [p.N for p in points] == [32, 64, 128]
        assert all(p.seconds > 0 for p in points)
        assert points[0].storage_bytes < points[1].storage_bytes < points[2].storage_bytes

    @pytest.mark.slow
    def test_near_linear_cost(self):
        """Doubling N from 2^14 costs at most three times as much."""
        points = benchmark_v_cycle([14, 15, 16], repeats=5)
        for small, large in zip(points, points[1:]):
            assert large.seconds / small.seconds <= 3.0
            assert large.storage_bytes / small.storage_bytes <= 2.2


# (errors, rates, average iterations) per N = 2^5 .. 2^8
ONE_D_REFERENCE = {
    1.1: (
        [7.8755e-5, 2.1801e-5, 5.6999e-6, 1.4565e-6],
        [None, 1.8530, 1.9354, 1.9684],
        [4.0, 4.0, 4.0, 3.0],
    ),
    1.9: (
        [7.5578e-5, 1.9255e-5, 4.8923e-6, 1.2407e-6],
        [None, 1.9727, 1.9766, 1.9794],
        [6.0, 6.0, 6.0, 6.0],
    ),
}

# per N = 2^4 .. 2^6, identical for both 2D schemes
TWO_D_REFERENCE = {
    (1.1, 1.1): (
        [2.4698e-5, 6.1249e-6, 1.5212e-6],
        [None, 2.0117, 2.0095],
        [4.5, 4.0, 4.0],
    ),
    (1.8, 1.9): (
        [2.5475e-5, 6.5211e-6, 1.6662e-6],
        [None, 1.9659, 1.9686],
        [7.0, 6.0, 6.0],
    ),
}

# per N = 2^3 .. 2^4
THREE_D_REFERENCE = {
    (1.1, 1.1, 1.1): ([5.9349e-6, 1.4792e-6], [None, 2.0044]),
    (1.8, 1.9, 1.8): ([5.8311e-6, 1.4867e-6], [None, 1.9717]),
}


def _study(**kwargs):
    report = StudyOrchestrator(RunConfig(**kwargs)).run()
    assert report.succeeded
    return report.rows


def _check_rows(rows, errors, rates, iterations=None, rate_tol=0.1):
    assert len(rows) == len(errors)
    for index, (row, error, rate) in enumerate(zip(rows, errors, rates)):
        assert row.max_error == pytest.approx(error, rel=0.02), index
        if rate is None:
            assert row.rate is None
        else:
            assert row.rate == pytest.approx(rate, abs=rate_tol), index
    if iterations is not None:
        for index, (row, expected) in enumerate(zip(rows, iterations)):
            assert abs(row.avg_iter - expected) <= 1.0, (index, row.avg_iter)


@pytest.mark.slow
class TestReferenceConvergence:
    """Reference errors (2% relative), rates and average V-cycles for the built-in problems."""

    @pytest.mark.parametrize("alpha", sorted(ONE_D_REFERENCE))
    def test_one_dimensional(self, alpha):
        """N = 2^5 .. 2^8 with Crank-Nicolson."""
        errors, rates, iterations = ONE_D_REFERENCE[alpha]
        rows = _study(problem="1d", alpha=alpha, kmin=5, kmax=8)
        _check_rows(rows, errors, rates, iterations)

    @pytest.mark.parametrize("scheme", ["dad", "prad"])
    @pytest.mark.parametrize("orders", sorted(TWO_D_REFERENCE))
    def test_two_dimensional(self, orders, scheme):
        """N = 2^4 .. 2^6 with both splittings."""
        errors, rates, iterations = TWO_D_REFERENCE[orders]
        alpha, beta = orders
        rows = _study(problem="2d", alpha=alpha, beta=beta, scheme=scheme, kmin=4, kmax=6)
        _check_rows(rows, errors, rates, iterations)

    @pytest.mark.parametrize("orders", sorted(THREE_D_REFERENCE))
    def test_three_dimensional(self, orders):
        """N = 2^3 .. 2^4 with the Douglas splitting."""
        errors, rates = THREE_D_REFERENCE[orders]
        alpha, beta, gamma = orders
        rows = _study(problem="3d", alpha=alpha, beta=beta, gamma=gamma, kmin=3, kmax=4)
        _check_rows(rows, errors, rates, rate_tol=0.15)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
