"""Grid scan and single-point summary output."""

from typing import Any, List, Optional, Sequence

import numpy as np

from mdi_qpq.analysis.models import GridAxis
from mdi_qpq.analysis.scan import (
    default_axis,
    grid_scan,
    security_summary,
    theta_scan,
)
from mdi_qpq.io import to_csv, to_json
from mdi_qpq.qstate.models import HALF_PI
from mdi_qpq.sift.export import format_probability


def _format(value: object) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    return format_probability(float(value))  # type: ignore[arg-type]


def _axis(step: Optional[float], bounds: Optional[Sequence[float]]) -> GridAxis:
    """Default open axis, or a closed one when a range is given."""
    if step is None and bounds is None:
        return default_axis()
    start, stop = bounds if bounds is not None else (0.0, HALF_PI)
    width = step if step is not None else default_axis().step
    return GridAxis(start=start, stop=stop, step=width, open_interval=bounds is None)


def _render(columns: Sequence[str], rows: List[List[Any]]) -> str:
    lines = [list(columns)]
    lines.extend([_format(v) for v in row] for row in rows)
    return to_csv(lines)


def render_scan(
    step: Optional[float] = None,
    g1_range: Optional[Sequence[float]] = None,
    g2_range: Optional[Sequence[float]] = None,
    columns: Optional[Sequence[str]] = None,
) -> str:
    """The scan grid as CSV, one row per (γ1, γ2) cell."""
    scan = grid_scan(_axis(step, g1_range), _axis(step, g2_range), columns or None)
    return _render(scan.columns, scan.rows())


def render_theta_scan(
    step: Optional[float] = None,
    theta_range: Optional[Sequence[float]] = None,
    columns: Optional[Sequence[str]] = None,
) -> str:
    """The qubit sweep as CSV, one row per θ."""
    scan = theta_scan(_axis(step, theta_range), columns or None)
    return _render(scan.columns, scan.rows())


def render_summary(gamma1: float, gamma2: float) -> str:
    return to_json(security_summary(gamma1, gamma2).to_dict())
