"""Models for probability tables and Alice's sifting verdicts."""

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from mdi_qpq.exceptions import InvariantViolationError


@dataclass(frozen=True)
class ProbabilityTable:
    """Target-outcome probabilities, rows for Alice's states, columns for Bob's."""

    row_labels: Tuple[str, ...]
    col_labels: Tuple[str, ...]
    entries: np.ndarray
    normalized: bool = False
    norm_constant: float = 1.0

    def __post_init__(self) -> None:
        entries = np.array(self.entries, dtype=np.float64)
        if entries.shape != (len(self.row_labels), len(self.col_labels)):
            raise InvariantViolationError(
                f"Table shape {entries.shape} does not match "
                f"{len(self.row_labels)}x{len(self.col_labels)} labels"
            )
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def column_sums(self) -> np.ndarray:
        sums: np.ndarray = self.entries.sum(axis=0)
        return sums

    def cell(self, row_label: str, col_label: str) -> float:
        """Look up an entry by Alice's and Bob's state labels."""
        return float(
            self.entries[
                self.row_labels.index(row_label), self.col_labels.index(col_label)
            ]
        )


@dataclass(frozen=True)
class ConclusiveVerdict:
    """Whether Alice can name Bob's key bit with certainty after an announcement."""

    conclusive: bool
    inferred_key_bit: Optional[int] = None
    excluded_candidate: Optional[str] = None
    degenerate: bool = False

    def __post_init__(self) -> None:
        if self.conclusive != (self.inferred_key_bit is not None):
            raise InvariantViolationError(
                "inferred_key_bit must be present exactly when conclusive"
            )
        if self.degenerate and self.conclusive:
            raise InvariantViolationError("A degenerate verdict cannot be conclusive")


class BobStrategy(str, Enum):
    """What Bob sends: honest ensemble states or the half-angle middle states."""

    HONEST = "honest"
    MIDDLE_ATTACK = "middle_attack"
