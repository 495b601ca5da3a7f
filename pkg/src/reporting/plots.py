"""
Log-log error plots of convergence studies.
"""
import math
from pathlib import Path
from typing import Sequence

import numpy as np
import plotly.graph_objects as go

from src.models import ConvergenceRow


def fit_slope(rows: Sequence[ConvergenceRow]) -> float:
    """Least-squares slope of log(error) against log(N)."""
    points = [(r.N, r.max_error) for r in rows if r.max_error > 0 and not math.isnan(r.max_error)]
    if len(points) < 2:
        raise ValueError("Need at least two rows with positive error to fit a slope")
    n, err = np.array(points, dtype=np.float64).T
    slope, _ = np.polyfit(np.log(n), np.log(err), 1)
    return float(slope)


def build_figure(rows: Sequence[ConvergenceRow], title: str = "Convergence") -> go.Figure:
    """Measured errors plus a slope -2 line through the first point."""
    points = [r for r in rows if r.max_error > 0 and not math.isnan(r.max_error)]
    n = [r.N for r in points]
    err = [r.max_error for r in points]

    fig = go.Figure()
    fig.add_trace(go.Scatter(x=n, y=err, mode="lines+markers", name="max error"))
    if points:
        reference = [err[0] * (n[0] / k) ** 2 for k in n]
        fig.add_trace(go.Scatter(
            x=n, y=reference, mode="lines", name="slope -2", line=dict(dash="dash"),
        ))

    fig.update_layout(
        title=title,
        template="plotly_white",
        height=500,
        margin=dict(l=50, r=50, t=50, b=50),
        xaxis=dict(type="log", title="N"),
        yaxis=dict(type="log", title="max error", exponentformat="e"),
    )
    return fig


def emit_plot(
    rows: Sequence[ConvergenceRow],
    path: Path,
    title: str = "Convergence",
    include_plotlyjs=True,
) -> Path:
    """Write the figure as a self-contained HTML document (plotly.js inlined);
    identical rows give identical bytes."""
    path = Path(path)
    html = build_figure(rows, title).to_html(include_plotlyjs=include_plotlyjs, div_id="convergence")
    path.write_text(html, encoding="utf-8")
    return path
