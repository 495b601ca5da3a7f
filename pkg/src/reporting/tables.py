"""
Convergence tables as text and CSV.
"""
import math
from pathlib import Path
from typing import List, Sequence

import pandas as pd

from src.models import ConvergenceRow

COLUMNS = ["N", "max_error", "rate", "avg_iter", "cpu_seconds"]


def rows_to_frame(rows: Sequence[ConvergenceRow]) -> pd.DataFrame:
    frame = pd.DataFrame([row.model_dump() for row in rows], columns=COLUMNS)
    return frame.astype({"N": "int64", "max_error": "float64", "rate": "float64",
                         "avg_iter": "float64", "cpu_seconds": "float64"})


def emit_table(rows: Sequence[ConvergenceRow], title: str = "") -> str:
    """Text table in the usual layout: N, error, rate, Iter, CPU."""
    frame = rows_to_frame(rows).rename(columns={
        "max_error": "Error", "rate": "Rate", "avg_iter": "Iter", "cpu_seconds": "CPU (s)",
    })
    text = frame.to_string(
        index=False,
        na_rep="",
        formatters={
            "Error": lambda v: "NaN" if math.isnan(v) else f"{v:.4e}",
            "Rate": lambda v: "" if math.isnan(v) else f"{v:.4f}",
            "Iter": lambda v: f"{v:.1f}",
            "CPU (s)": lambda v: f"{v:.3f}",
        },
    )
    return f"{title}\n{text}" if title else text


def emit_csv(rows: Sequence[ConvergenceRow], path: Path) -> Path:
    """Write N,max_error,rate,avg_iter,cpu_seconds; the first row's rate is blank."""
    path = Path(path)
    rows_to_frame(rows).to_csv(path, index=False, na_rep="", float_format="%.17g")
    return path


def read_csv(path: Path) -> List[ConvergenceRow]:
    """Parse a CSV written by emit_csv."""
    frame = pd.read_csv(path, float_precision="round_trip")
    missing = [c for c in COLUMNS if c not in frame.columns]
    if missing:
        raise ValueError(f"{path} lacks columns {missing}")

    rows = []
    for record in frame[COLUMNS].to_dict(orient="records"):
        rate = record["rate"]
        rows.append(ConvergenceRow(
            N=int(record["N"]),
            max_error=float(record["max_error"]),
            rate=None if pd.isna(rate) else float(rate),
            avg_iter=float(record["avg_iter"]),
            cpu_seconds=float(record["cpu_seconds"]),
        ))
    return rows
