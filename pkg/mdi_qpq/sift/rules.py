"""Alice's conclusiveness rule and the quantities derived from it.

One generic rule replaces the enumerated sifting cases: after Bob announces
an index, the two candidates are the computational and second-basis states
carrying it. If exactly one of them can produce the recorded Bell outcome
together with Alice's own state, Alice knows Bob's basis, hence his key bit.
"""

import logging
from functools import lru_cache
from typing import Dict, FrozenSet, Tuple

import numpy as np

from mdi_qpq.config import numerics_config
from mdi_qpq.exceptions import DomainError
from mdi_qpq.qstate.bell import bell_basis, bsm_probability
from mdi_qpq.qstate.ensembles import ensemble_for, middle_states_for
from mdi_qpq.qstate.models import HALF_PI, LabeledStates, ProtocolParams

from .models import BobStrategy, ConclusiveVerdict, ProbabilityTable
from .tables import honest_table, middle_table, normalize_columns

logger = logging.getLogger(__name__)

# What dishonest Bob declares for |0''>, |1''>, ... in each dimension
MIDDLE_ANNOUNCEMENTS: Dict[int, Tuple[int, ...]] = {3: (1, 2, 0), 2: (1, 0)}

VerdictTable = Tuple[Tuple[ConclusiveVerdict, ...], ...]

# Interior angles with no vanishing cross-basis overlap, used on the boundary
REFERENCE_QUTRIT_ANGLES = (0.61, 0.97)
REFERENCE_QUBIT_ANGLE = 0.61


def _angles(params: ProtocolParams) -> Tuple[float, ...]:
    values = (params.gamma1, params.gamma2, params.theta)
    return tuple(v for v in values if v is not None)


def is_interior(params: ProtocolParams) -> bool:
    """True when every basis angle lies strictly inside (0, π/2)."""
    return all(0 < angle < HALF_PI for angle in _angles(params))


def reachability_params(params: ProtocolParams) -> ProtocolParams:
    """Params at which Alice reads which candidates can reach the target.

    Interior angles and the Fourier ensemble are used as given. On the boundary
    of [0, π/2] extra overlaps vanish and would make rounds conclusive that the
    closed forms do not count, so the pattern of a fixed interior angle is used.
    """
    if params.is_fourier or is_interior(params):
        return params
    if params.dim == 3:
        return ProtocolParams.qutrit(*REFERENCE_QUTRIT_ANGLES, params.target)
    return ProtocolParams.qubit(REFERENCE_QUBIT_ANGLE, params.target)


@lru_cache(maxsize=256)
def verdict_table(params: ProtocolParams) -> VerdictTable:
    """Verdicts indexed [alice_state][announcement] for params."""
    ensemble = ensemble_for(reachability_params(params))
    bell = bell_basis(params.dim)
    tolerance = numerics_config.zero_tolerance

    rows = []
    for alice in ensemble.states:
        row = []
        for announcement in range(params.dim):
            computational, rotated = ensemble.candidates(announcement)
            computational_state = ensemble.states[computational]
            rotated_state = ensemble.states[rotated]
            reach_computational = (
                bsm_probability(alice, computational_state, bell, params.target)
                > tolerance
            )
            reach_rotated = (
                bsm_probability(alice, rotated_state, bell, params.target) > tolerance
            )
            if reach_computational and not reach_rotated:
                verdict = ConclusiveVerdict(
                    conclusive=True,
                    inferred_key_bit=ensemble.basis_of[computational],
                    excluded_candidate=ensemble.labels[rotated],
                )
            elif reach_rotated and not reach_computational:
                verdict = ConclusiveVerdict(
                    conclusive=True,
                    inferred_key_bit=ensemble.basis_of[rotated],
                    excluded_candidate=ensemble.labels[computational],
                )
            else:
                verdict = ConclusiveVerdict(
                    conclusive=False,
                    degenerate=not (reach_computational or reach_rotated),
                )
            row.append(verdict)
        rows.append(tuple(row))
    return tuple(rows)


def conclusive_verdict(
    alice_state: int, announcement: int, params: ProtocolParams
) -> ConclusiveVerdict:
    """Alice's verdict for her state index and Bob's announced index."""
    table = verdict_table(params)
    if not 0 <= alice_state < len(table):
        raise DomainError(f"Alice state {alice_state} outside 0..{len(table) - 1}")
    if not 0 <= announcement < params.dim:
        raise DomainError(f"Announcement {announcement} outside 0..{params.dim - 1}")
    return table[alice_state][announcement]


def bob_states_for(params: ProtocolParams, strategy: BobStrategy) -> LabeledStates:
    """The family Bob draws from under a strategy."""
    if strategy == BobStrategy.HONEST:
        return ensemble_for(params)
    return middle_states_for(params)


def announcements_for(
    params: ProtocolParams, strategy: BobStrategy
) -> Tuple[int, ...]:
    """Bob's announced index for each state he may send."""
    if strategy == BobStrategy.HONEST:
        return ensemble_for(params).index_of
    return MIDDLE_ANNOUNCEMENTS[params.dim]


def bob_table(params: ProtocolParams, strategy: BobStrategy) -> ProbabilityTable:
    """Raw target-outcome table with Bob's columns for a strategy."""
    if strategy == BobStrategy.HONEST:
        return honest_table(params)
    return middle_table(params)


def conclusive_sets(params: ProtocolParams) -> Dict[str, FrozenSet[str]]:
    """For each honest Bob state, Alice's states that end in a conclusive round."""
    ensemble = ensemble_for(params)
    table = honest_table(params)
    verdicts = verdict_table(params)
    tolerance = numerics_config.zero_tolerance

    sets: Dict[str, FrozenSet[str]] = {}
    for b, bob_label in enumerate(ensemble.labels):
        announcement = ensemble.index_of[b]
        sets[bob_label] = frozenset(
            ensemble.labels[a]
            for a in range(len(ensemble))
            if verdicts[a][announcement].conclusive
            and table.entries[a, b] > tolerance
        )
    return sets


def conclusive_bit_masses(
    params: ProtocolParams, strategy: BobStrategy = BobStrategy.HONEST
) -> np.ndarray:
    """Per Bob state, the normalized column mass of Alice's key-0 and key-1 verdicts.

    Row b holds (P(Alice concludes 0 | target, b), P(Alice concludes 1 | target, b)).
    For the qutrit middle state |0''> these are p0 and p1.
    """
    table = normalize_columns(bob_table(params, strategy))
    verdicts = verdict_table(params)
    announcements = announcements_for(params, strategy)

    masses = np.zeros((len(announcements), 2))
    for b, announcement in enumerate(announcements):
        for a in range(len(verdicts)):
            verdict = verdicts[a][announcement]
            if verdict.conclusive:
                assert verdict.inferred_key_bit is not None
                masses[b, verdict.inferred_key_bit] += table.entries[a, b]
    return masses


def conclusive_rate_from_table(
    params: ProtocolParams, strategy: BobStrategy = BobStrategy.HONEST
) -> float:
    """Alice's conclusive rate as the Bob-averaged sum of normalized cells."""
    return float(conclusive_bit_masses(params, strategy).sum(axis=1).mean())


def joint_conclusive_rate(
    params: ProtocolParams, strategy: BobStrategy = BobStrategy.HONEST
) -> float:
    """P(conclusive | target) from the raw joint distribution, states uniform."""
    raw = bob_table(params, strategy).entries
    verdicts = verdict_table(params)
    announcements = announcements_for(params, strategy)

    mask = np.array(
        [
            [verdicts[a][announcement].conclusive for announcement in announcements]
            for a in range(raw.shape[0])
        ]
    )
    target_mass = float(raw.sum())
    return float((raw * mask).sum()) / target_mass
