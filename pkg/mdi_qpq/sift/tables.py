"""Analytic target-outcome tables and their column normalization."""

import logging
from typing import Optional, Sequence, Union

import numpy as np

from mdi_qpq.config import numerics_config
from mdi_qpq.exceptions import DimensionMismatchError, InvariantViolationError
from mdi_qpq.qstate.bell import bell_basis, bsm_probability
from mdi_qpq.qstate.ensembles import ensemble_for, middle_states_for
from mdi_qpq.qstate.models import (
    BellBasis,
    LabeledStates,
    ProtocolParams,
    StateVector,
)

from .models import ProbabilityTable

logger = logging.getLogger(__name__)


def joint_table(
    alice_states: Union[LabeledStates, Sequence[StateVector]],
    bob_states: Union[LabeledStates, Sequence[StateVector]],
    bell: BellBasis,
    outcome: int,
    row_labels: Optional[Sequence[str]] = None,
    col_labels: Optional[Sequence[str]] = None,
) -> ProbabilityTable:
    """Un-normalized table with entry (i, j) = bsm_probability(alice_i, bob_j).

    Raises:
        DimensionMismatchError: If the families and the Bell basis disagree
    """
    if isinstance(alice_states, LabeledStates):
        row_labels = row_labels or alice_states.labels
        alice_states = alice_states.states
    if isinstance(bob_states, LabeledStates):
        col_labels = col_labels or bob_states.labels
        bob_states = bob_states.states

    dims = {s.dim for s in alice_states} | {s.dim for s in bob_states}
    if dims != {bell.dim}:
        raise DimensionMismatchError(
            f"State dimensions {sorted(dims)} do not match Bell basis {bell.dim}"
        )
    rows = tuple(row_labels or (f"a{i}" for i in range(len(alice_states))))
    cols = tuple(col_labels or (f"b{j}" for j in range(len(bob_states))))

    entries = np.array(
        [
            [bsm_probability(a, b, bell, outcome) for b in bob_states]
            for a in alice_states
        ]
    )
    return ProbabilityTable(row_labels=rows, col_labels=cols, entries=entries)


def normalize_columns(table: ProbabilityTable) -> ProbabilityTable:
    """Divide every entry by the common column sum.

    A normalized table is returned unchanged.

    Raises:
        InvariantViolationError: If column sums differ or vanish, which only
            happens for an ensemble the protocol never uses
    """
    if table.normalized:
        return table

    sums = table.column_sums
    tolerance = numerics_config.zero_tolerance
    common = float(sums[0])
    if common <= tolerance:
        raise InvariantViolationError("Cannot normalize a table with a zero column")
    if not np.allclose(sums, common, atol=tolerance, rtol=0):
        logger.error(f"Unequal column sums: {sums}")
        raise InvariantViolationError(
            f"Column sums differ ({sums.min():.6g}..{sums.max():.6g})"
        )
    return ProbabilityTable(
        row_labels=table.row_labels,
        col_labels=table.col_labels,
        entries=table.entries / common,
        normalized=True,
        norm_constant=common,
    )


def honest_table(params: ProtocolParams) -> ProbabilityTable:
    """Alice's honest states against Bob's honest states."""
    ensemble = ensemble_for(params)
    return joint_table(
        ensemble.states,
        ensemble.states,
        bell_basis(params.dim),
        params.target,
        row_labels=ensemble.labels,
        col_labels=ensemble.labels,
    )


def middle_table(params: ProtocolParams) -> ProbabilityTable:
    """Alice's honest states against dishonest Bob's middle states."""
    ensemble = ensemble_for(params)
    middle = middle_states_for(params)
    return joint_table(
        ensemble.states,
        middle.states,
        bell_basis(params.dim),
        params.target,
        row_labels=ensemble.labels,
        col_labels=middle.labels,
    )
