"""Error estimation on a disclosed sample of Alice's conclusive bits."""

import logging
from typing import Optional, Tuple

from mdi_qpq.config import simulation_config
from mdi_qpq.exceptions import DomainError, ValidationError
from mdi_qpq.qstate.models import ProtocolParams
from mdi_qpq.sift.models import BobStrategy

from .engine import run_sift
from .models import KeyRecord, QberEstimate
from .streams import StreamTag, derived_seed, substream

logger = logging.getLogger(__name__)


def estimate_qber(
    record: KeyRecord, test_fraction: float, seed: int
) -> Tuple[QberEstimate, KeyRecord]:
    """Disclose a random share of Alice's known positions and count mismatches.

    Args:
        record: Key record of a sift run
        test_fraction: Share of Alice's usable known positions to disclose
        seed: Seed of the sampling stream

    Returns:
        The estimate, and the record with the tested positions consumed.
        Without known positions the estimate carries qber None.

    Raises:
        ValidationError: If test_fraction is outside (0, 1]
    """
    if not 0 < test_fraction <= 1:
        raise ValidationError(f"test_fraction must be in (0, 1], got {test_fraction}")

    known = record.usable_positions()
    if not known:
        logger.warning("No conclusive positions to test; no QBER estimate")
        return QberEstimate((), 0, test_fraction), record

    sample_size = max(1, round(test_fraction * len(known)))
    rng = substream(seed, StreamTag.TEST_SAMPLING)
    chosen = rng.choice(len(known), size=sample_size, replace=False)
    tested = tuple(sorted(known[int(k)] for k in chosen))
    mismatches = sum(record.alice_known[p] != record.bob_key[p] for p in tested)

    estimate = QberEstimate(tested, mismatches, test_fraction)
    logger.info(f"Tested {estimate.tested} positions, {mismatches} mismatches")
    return estimate, record.with_disclosed(frozenset(tested))


def detect_attack(qber: Optional[float], threshold: float) -> bool:
    """Alice aborts when the observed mismatch fraction reaches the threshold.

    A missing estimate is never flagged.
    """
    if not 0 <= threshold <= 1:
        raise DomainError(f"threshold must lie in [0, 1], got {threshold}")
    if qber is None:
        return False
    if not 0 <= qber <= 1:
        raise DomainError(f"qber must lie in [0, 1], got {qber}")
    return qber >= threshold


def empirical_detection_power(
    params: ProtocolParams,
    rounds: int,
    threshold: float,
    runs: int,
    seed: int,
    test_fraction: Optional[float] = None,
) -> float:
    """Fraction of independently seeded attack runs that Alice flags."""
    if runs < 1:
        raise ValidationError(f"runs must be positive, got {runs}")
    test_fraction = test_fraction or simulation_config.test_fraction

    detected = 0
    for i in range(runs):
        run_seed = derived_seed(seed, i)
        run = run_sift(params, rounds, BobStrategy.MIDDLE_ATTACK, run_seed)
        estimate, _ = estimate_qber(run.record, test_fraction, run_seed)
        detected += detect_attack(estimate.qber, threshold)
    power = detected / runs
    logger.info(f"Detected {detected}/{runs} attack runs at threshold {threshold}")
    return power
