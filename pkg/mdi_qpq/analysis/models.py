"""Models for security summaries and parameter-grid scans."""

from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Tuple

import numpy as np

from mdi_qpq.exceptions import ValidationError
from mdi_qpq.qstate.models import ProtocolParams

# Export columns, in order
SCAN_COLUMNS = (
    "gamma1",
    "gamma2",
    "p",
    "p_prime_g1",
    "p_prime_g2",
    "in_R1",
    "in_R2",
    "p_c_mid",
    "p0",
    "p1",
    "qber_expected",
)

# Qubit sweep columns, in order
THETA_SCAN_COLUMNS = (
    "theta",
    "p_prime",
    "p_c_mid_qubit",
    "p0",
    "p1",
    "qber_expected",
)


@dataclass(frozen=True)
class SecuritySummary:
    """Database-security and user-privacy figures at one (γ1, γ2)."""

    params: ProtocolParams
    honest_conclusive_rate: float
    qubit_rate_gamma1: float
    qubit_rate_gamma2: float
    in_r1: bool
    in_r2: bool
    attack_conclusive_rate: float
    p0: float
    p1: float
    expected_attack_qber: float
    expected_attack_qber_overall: float

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for JSON serialization."""
        data = asdict(self)
        data["params"] = {
            "dim": self.params.dim,
            "gamma1": self.params.gamma1,
            "gamma2": self.params.gamma2,
            "ensemble_kind": self.params.ensemble_kind.value,
            "target_bell_index": self.params.target_bell_index,
        }
        return data


@dataclass(frozen=True)
class GridAxis:
    """Uniformly spaced angle values; endpoints excluded when open."""

    start: float
    stop: float
    step: float
    open_interval: bool = True

    def values(self) -> np.ndarray:
        """Monotone axis values covering the declared range."""
        if self.step <= 0:
            raise ValidationError(f"Grid step must be positive, got {self.step}")
        if self.stop < self.start:
            raise ValidationError(f"Empty range [{self.start}, {self.stop}]")
        count = int(np.floor((self.stop - self.start) / self.step + 1e-9))
        values = self.start + self.step * np.arange(count + 1)
        if self.open_interval:
            tolerance = 1e-9 * self.step
            values = values[
                (values > self.start + tolerance) & (values < self.stop - tolerance)
            ]
        return values


@dataclass(frozen=True)
class GridScan:
    """Closed-form quantities evaluated over a (γ1, γ2) grid."""

    gamma1_axis: GridAxis
    gamma2_axis: GridAxis
    columns: Tuple[str, ...]
    values: Dict[str, np.ndarray]

    @property
    def shape(self) -> Tuple[int, int]:
        first = self.values[self.columns[0]]
        return (first.shape[0], first.shape[1])

    def rows(self) -> List[List[Any]]:
        """One row per cell in (γ1 index, γ2 index) order."""
        rows: List[List[Any]] = []
        n1, n2 = self.shape
        for i in range(n1):
            for j in range(n2):
                rows.append([self.values[c][i, j] for c in self.columns])
        return rows


@dataclass(frozen=True)
class ThetaScan:
    """Closed-form qubit quantities along a θ axis."""

    theta_axis: GridAxis
    columns: Tuple[str, ...]
    values: Dict[str, np.ndarray]

    def __len__(self) -> int:
        return int(self.values[self.columns[0]].shape[0])

    def rows(self) -> List[List[Any]]:
        """One row per θ value, in increasing order."""
        return [[self.values[c][i] for c in self.columns] for i in range(len(self))]
