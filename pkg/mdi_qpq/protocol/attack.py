"""Middle-state attack experiments and dishonest Bob's position guessing."""

import logging
from typing import Dict, Optional

import numpy as np

from mdi_qpq.analysis.rates import expected_attack_qber_overall
from mdi_qpq.config import numerics_config, simulation_config
from mdi_qpq.exceptions import SessionAbortedError, ValidationError
from mdi_qpq.qstate.ensembles import middle_states_for
from mdi_qpq.qstate.models import ProtocolParams
from mdi_qpq.sift.models import BobStrategy
from mdi_qpq.sift.rules import conclusive_bit_masses, conclusive_rate_from_table

from .engine import run_sift
from .models import AttackReport, KeyRecord, PositionGuessReport, SiftRun
from .reconciliation import detect_attack, estimate_qber
from .streams import StreamTag, substream

logger = logging.getLogger(__name__)


def bob_position_guess(
    run: SiftRun,
    record: KeyRecord,
    sessions: Optional[int] = None,
    seed: int = 0,
) -> PositionGuessReport:
    """Let Bob guess which key position Alice will query with.

    Bob scores every retained, undisclosed position by the conclusive mass of
    the middle state he sent there and guesses uniformly among the best
    scored. Each session Alice draws her position uniformly from her usable
    ones.

    Raises:
        ValidationError: For an honest run, or a record of another run
        SessionAbortedError: If Alice has no usable position
    """
    if run.strategy != BobStrategy.MIDDLE_ATTACK:
        raise ValidationError("Position guessing needs a middle-state attack run")
    if record.key_length != run.retained_count:
        raise ValidationError("Record does not belong to this run")
    sessions = sessions or simulation_config.guess_sessions
    if sessions < 1:
        raise ValidationError(f"sessions must be positive, got {sessions}")

    usable = np.asarray(record.usable_positions(), dtype=np.int64)
    if usable.size == 0:
        raise SessionAbortedError("Alice has no usable position to guess")

    candidates = np.asarray(
        [p for p in range(record.key_length) if p not in record.disclosed],
        dtype=np.int64,
    )
    scores = conclusive_bit_masses(run.params, run.strategy).sum(axis=1)
    position_scores = scores[run.bob_state[candidates]]
    best = position_scores.max()
    top = candidates[position_scores >= best - numerics_config.zero_tolerance]

    rng = substream(seed, StreamTag.GUESS)
    alice_choice = usable[rng.integers(usable.size, size=sessions)]
    bob_choice = top[rng.integers(top.size, size=sessions)]
    hits = int(np.sum(alice_choice == bob_choice))

    overlap = np.intersect1d(top, usable).size
    report = PositionGuessReport(
        sessions=sessions,
        candidates=int(candidates.size),
        top_positions=int(top.size),
        usable_positions=int(usable.size),
        hits=hits,
        exact_success=overlap / (top.size * usable.size),
        baseline=1 / candidates.size,
        usable_reference=1 / usable.size,
    )
    logger.info(
        f"Bob hit Alice's position in {hits}/{sessions} sessions "
        f"(baseline {report.baseline:.4g})"
    )
    return report


def run_attack_experiment(
    params: ProtocolParams,
    rounds: int,
    seed: int,
    threshold: Optional[float] = None,
    test_fraction: Optional[float] = None,
    guess_sessions: Optional[int] = None,
) -> AttackReport:
    """Middle-state attack, error estimation, detection and position guessing."""
    threshold = simulation_config.threshold if threshold is None else threshold
    test_fraction = test_fraction or simulation_config.test_fraction

    run = run_sift(params, rounds, BobStrategy.MIDDLE_ATTACK, seed)
    estimate, record = estimate_qber(run.record, test_fraction, seed)
    detected = detect_attack(estimate.qber, threshold)

    labels = middle_states_for(params).labels
    masses = conclusive_bit_masses(params, BobStrategy.MIDDLE_ATTACK)
    tested = np.asarray(estimate.tested_positions, dtype=np.int64)
    per_state: Dict[str, Optional[float]] = {}
    per_state_expected: Dict[str, float] = {}
    for b, label in enumerate(labels):
        mine = tested[run.bob_state[tested] == b] if tested.size else tested
        mismatches = sum(record.alice_known[p] != record.bob_key[p] for p in mine)
        per_state[label] = mismatches / mine.size if mine.size else None
        per_state_expected[label] = float(masses[b].min() / masses[b].sum())

    try:
        guess = bob_position_guess(run, record, guess_sessions, seed)
    except SessionAbortedError:
        logger.warning("No usable positions left; skipping position guessing")
        guess = None

    report = AttackReport(
        mode="qutrit" if params.dim == 3 else "qubit",
        conclusive_rate_observed=run.conclusive_rate,
        conclusive_rate_expected=conclusive_rate_from_table(
            params, BobStrategy.MIDDLE_ATTACK
        ),
        qber_observed=estimate.qber,
        qber_expected=expected_attack_qber_overall(params),
        qber_expected_declared=per_state_expected[labels[0]],
        threshold=threshold,
        detected=detected,
        per_state_qber=per_state,
        per_state_qber_expected=per_state_expected,
        estimate=estimate,
        guess=guess,
        run=run,
    )
    logger.info(
        f"Attack run: qber {estimate.qber}, threshold {threshold}, "
        f"detected={detected}"
    )
    return report
