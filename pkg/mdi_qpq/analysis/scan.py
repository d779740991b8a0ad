"""Security summaries and parameter-grid scans over the angle square."""

import logging
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np

from mdi_qpq.config import scan_config
from mdi_qpq.exceptions import ValidationError
from mdi_qpq.qstate.models import HALF_PI, ProtocolParams

from .models import (
    SCAN_COLUMNS,
    THETA_SCAN_COLUMNS,
    GridAxis,
    GridScan,
    SecuritySummary,
    ThetaScan,
)
from .rates import (
    attack_bit_probabilities,
    attack_bit_probabilities_qubit,
    attack_rate_qubit,
    attack_rate_qutrit,
    expected_attack_qber,
    expected_attack_qber_overall,
    honest_rate_qubit,
    honest_rate_qutrit,
    region_membership,
)

logger = logging.getLogger(__name__)


def default_axis() -> GridAxis:
    """The configured number of points, uniformly spaced inside (0, π/2)."""
    return GridAxis(start=0.0, stop=HALF_PI, step=HALF_PI / (scan_config.points + 1))


def security_summary(gamma1: float, gamma2: float) -> SecuritySummary:
    """All closed-form figures for the qutrit protocol at (γ1, γ2)."""
    params = ProtocolParams.qutrit(gamma1, gamma2)
    in_r1, in_r2 = region_membership(gamma1, gamma2)
    p0, p1 = attack_bit_probabilities(gamma1, gamma2)
    return SecuritySummary(
        params=params,
        honest_conclusive_rate=float(honest_rate_qutrit(gamma1, gamma2)),
        qubit_rate_gamma1=float(honest_rate_qubit(gamma1)),
        qubit_rate_gamma2=float(honest_rate_qubit(gamma2)),
        in_r1=bool(in_r1),
        in_r2=bool(in_r2),
        attack_conclusive_rate=float(attack_rate_qutrit(gamma1, gamma2)),
        p0=float(p0),
        p1=float(p1),
        expected_attack_qber=float(expected_attack_qber(gamma1, gamma2)),
        expected_attack_qber_overall=expected_attack_qber_overall(params),
    )


def _select_columns(
    quantities: Optional[Sequence[str]], available: Tuple[str, ...]
) -> Tuple[str, ...]:
    """Requested columns in export order; all of them when none are named."""
    requested = set(quantities or available)
    unknown = requested - set(available)
    if unknown:
        raise ValidationError(f"Unknown scan columns: {sorted(unknown)}")
    return tuple(c for c in available if c in requested)


def _axis_values(axis: GridAxis) -> np.ndarray:
    if axis.start < 0 or axis.stop > HALF_PI + 1e-12:
        raise ValidationError(f"Scan range must lie within [0, π/2]: {axis}")
    values = axis.values()
    if values.size == 0:
        raise ValidationError("Scan grid is empty")
    return values


def _evaluators() -> Dict[str, Callable[[np.ndarray, np.ndarray], np.ndarray]]:
    return {
        "gamma1": lambda g1, g2: g1,
        "gamma2": lambda g1, g2: g2,
        "p": lambda g1, g2: np.asarray(honest_rate_qutrit(g1, g2)),
        "p_prime_g1": lambda g1, g2: np.asarray(honest_rate_qubit(g1)),
        "p_prime_g2": lambda g1, g2: np.asarray(honest_rate_qubit(g2)),
        "in_R1": lambda g1, g2: np.asarray(region_membership(g1, g2)[0]),
        "in_R2": lambda g1, g2: np.asarray(region_membership(g1, g2)[1]),
        "p_c_mid": lambda g1, g2: np.asarray(attack_rate_qutrit(g1, g2)),
        "p0": lambda g1, g2: np.asarray(attack_bit_probabilities(g1, g2)[0]),
        "p1": lambda g1, g2: np.asarray(attack_bit_probabilities(g1, g2)[1]),
        "qber_expected": lambda g1, g2: np.asarray(expected_attack_qber(g1, g2)),
    }


def grid_scan(
    gamma1_axis: Optional[GridAxis] = None,
    gamma2_axis: Optional[GridAxis] = None,
    quantities: Optional[Sequence[str]] = None,
) -> GridScan:
    """Evaluate closed forms on every (γ1, γ2) cell.

    Args:
        gamma1_axis: Rows of the grid; defaults to the configured open axis
        gamma2_axis: Columns of the grid; defaults likewise
        quantities: Export columns to keep, in SCAN_COLUMNS order; all by default

    Raises:
        ValidationError: On an empty grid, a range outside [0, π/2] or an
            unknown column
    """
    gamma1_axis = gamma1_axis or default_axis()
    gamma2_axis = gamma2_axis or default_axis()
    columns = _select_columns(quantities, SCAN_COLUMNS)
    g1_values = _axis_values(gamma1_axis)
    g2_values = _axis_values(gamma2_axis)

    g1, g2 = np.meshgrid(g1_values, g2_values, indexing="ij")
    evaluators = _evaluators()
    values = {column: evaluators[column](g1, g2) for column in columns}
    logger.info(f"Scanned {g1.size} cells ({g1.shape[0]}x{g1.shape[1]})")
    return GridScan(
        gamma1_axis=gamma1_axis,
        gamma2_axis=gamma2_axis,
        columns=columns,
        values=values,
    )


def theta_scan(
    theta_axis: Optional[GridAxis] = None,
    quantities: Optional[Sequence[str]] = None,
) -> ThetaScan:
    """Evaluate the qubit closed forms along θ.

    Honest rate p′, attacked rate p_c,mid and the bit masses p0 = p1 against θ.

    Raises:
        ValidationError: On an empty axis, a range outside [0, π/2] or an
            unknown column
    """
    theta_axis = theta_axis or default_axis()
    columns = _select_columns(quantities, THETA_SCAN_COLUMNS)
    theta = _axis_values(theta_axis)

    p0, p1 = attack_bit_probabilities_qubit(theta)
    evaluated = {
        "theta": theta,
        "p_prime": np.asarray(honest_rate_qubit(theta)),
        "p_c_mid_qubit": np.asarray(attack_rate_qubit(theta)),
        "p0": np.asarray(p0),
        "p1": np.asarray(p1),
        "qber_expected": np.asarray(p0) / (np.asarray(p0) + np.asarray(p1)),
    }
    logger.info(f"Scanned {theta.size} qubit angles")
    return ThetaScan(
        theta_axis=theta_axis,
        columns=columns,
        values={column: evaluated[column] for column in columns},
    )
