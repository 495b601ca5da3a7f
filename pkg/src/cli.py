"""
Command-line entry point for convergence studies and V-cycle benchmarks.
"""
import argparse
import sys
from typing import List, Optional

import pandas as pd
from pydantic import ValidationError

from src.config import RunConfig
from src.exceptions import DomainError
from src.orchestrator import StudyOrchestrator, benchmark_v_cycle
from src.reporting.plots import emit_plot, fit_slope
from src.reporting.tables import emit_csv, emit_table
from src.utils.logger import get_logger, setup_logging

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_ROW_FAILED = 1
EXIT_CONFIG = 2

# argparse dest -> RunConfig field; every flag defaults to None so unset flags
# leave the config file and environment in charge
FLAGS = [
    ("--problem", str, "1d | 2d | 3d | custom"),
    ("--alpha", float, "order along x"),
    ("--beta", float, "order along y"),
    ("--gamma", float, "order along z"),
    ("--scheme", str, "cn | dad | prad (default: cn in 1D, dad otherwise)"),
    ("--kmin", int, "smallest exponent, N = 2^kmin"),
    ("--kmax", int, "largest exponent, N = 2^kmax"),
    ("--tol", float, "relative residual tolerance of multigrid"),
    ("--omega-pre", float, "pre-smoothing Jacobi weight"),
    ("--omega-post", float, "post-smoothing Jacobi weight"),
    ("--nu1", int, "pre-smoothing sweeps"),
    ("--nu2", int, "post-smoothing sweeps"),
    ("--coarsest-size", int, "interior points solved directly (2^j - 1)"),
    ("--max-iterations", int, "V-cycle cap per solve"),
    ("--time-steps", int, "time steps per row (default N)"),
    ("--t-final", float, "final time"),
    ("--custom-problem", str, "module:callable returning a problem"),
    ("--out", str, "CSV output path"),
    ("--plot", str, "HTML plot output path"),
    ("--log-level", str, "DEBUG | INFO | WARNING | ERROR"),
]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fracdiff",
        description="Convergence studies for Riesz fractional diffusion with LOD multigrid.",
    )
    parser.add_argument("--config", help="flat key=value config file")
    for flag, kind, text in FLAGS:
        parser.add_argument(flag, type=kind, default=None, help=text)
    parser.add_argument("--json-logs", action="store_true", default=None, help="JSON log lines")
    parser.add_argument(
        "--benchmark",
        action="store_true",
        help="time one 1D V-cycle for each N = 2^kmin .. 2^kmax instead of running a study",
    )
    return parser


def _overrides(args: argparse.Namespace) -> dict:
    names = [flag[2:].replace("-", "_") for flag, _, _ in FLAGS] + ["json_logs"]
    return {name: getattr(args, name) for name in names}


def _run_benchmark(cfg: RunConfig) -> int:
    points = benchmark_v_cycle(cfg.exponents, nu=cfg.alpha, coarsest_size=cfg.coarsest_size)
    frame = pd.DataFrame([p.model_dump() for p in points])
    frame["ratio"] = frame["seconds"] / frame["seconds"].shift(1)
    print(frame.to_string(index=False, na_rep=""))
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)

    try:
        cfg = RunConfig.load(args.config, **_overrides(args))
    except (ValidationError, DomainError, FileNotFoundError) as e:
        print(f"Invalid configuration: {e}", file=sys.stderr)
        return EXIT_CONFIG

    setup_logging(cfg.log_level, cfg.json_logs)

    if args.benchmark:
        return _run_benchmark(cfg)

    try:
        orchestrator = StudyOrchestrator(cfg)
    except DomainError as e:
        print(f"Invalid configuration: {e}", file=sys.stderr)
        return EXIT_CONFIG

    report = orchestrator.run()
    title = f"{orchestrator.problem.describe()} with {orchestrator.scheme.value}"
    print(emit_table(report.rows, title=title))

    if cfg.out is not None:
        emit_csv(report.rows, cfg.out)
        logger.info("CSV written", path=str(cfg.out))
    if cfg.plot is not None and report.rows:
        emit_plot(report.rows, cfg.plot, title=title)
        logger.info("Plot written", path=str(cfg.plot))
    if len(report.rows) >= 2:
        try:
            print(f"fitted slope: {fit_slope(report.rows):.4f}")
        except ValueError:
            pass

    for failure in report.failures:
        print(f"N={failure.N} failed: {failure.error}", file=sys.stderr)
    return EXIT_OK if report.succeeded else EXIT_ROW_FAILED


if __name__ == "__main__":
    sys.exit(main())
