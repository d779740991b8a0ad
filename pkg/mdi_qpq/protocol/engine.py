"""Seeded, vectorized simulation of the key-establishment rounds."""

import logging
from typing import List, Optional, Tuple

import numpy as np

from mdi_qpq.config import numerics_config, simulation_config
from mdi_qpq.exceptions import InvariantViolationError, ValidationError
from mdi_qpq.qstate.bell import bell_basis, outcome_tensor
from mdi_qpq.qstate.ensembles import ensemble_for
from mdi_qpq.qstate.models import ProtocolParams
from mdi_qpq.sift.models import BobStrategy
from mdi_qpq.sift.rules import (
    VerdictTable,
    announcements_for,
    bob_states_for,
    conclusive_bit_masses,
    verdict_table,
)

from .models import SiftRun
from .streams import RoundStream, check_seed

logger = logging.getLogger(__name__)

# Marks "no inserted bit preference" and "Alice has no bit"
NO_BIT = -1


def insertion_bits(params: ProtocolParams) -> np.ndarray:
    """Bit dishonest Bob records for each middle state, NO_BIT for a coin flip.

    Bob records the bit Alice is more likely to conclude after his
    declaration; equal masses leave him nothing better than a random bit.
    """
    masses = conclusive_bit_masses(params, BobStrategy.MIDDLE_ATTACK)
    tolerance = numerics_config.zero_tolerance
    preferred = np.argmax(masses, axis=1)
    tied = np.abs(masses[:, 0] - masses[:, 1]) <= tolerance
    return np.where(tied, NO_BIT, preferred)


def _pick(uniforms: np.ndarray, count: int) -> np.ndarray:
    return np.minimum((uniforms * count).astype(np.int64), count - 1)


def _verdict_arrays(
    verdicts: VerdictTable,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Conclusive flags, degenerate flags and inferred bits indexed [alice, index]."""
    conclusive = np.array([[v.conclusive for v in row] for row in verdicts])
    degenerate = np.array([[v.degenerate for v in row] for row in verdicts])
    bits = np.array(
        [
            [NO_BIT if v.inferred_key_bit is None else v.inferred_key_bit for v in row]
            for row in verdicts
        ]
    )
    return conclusive, degenerate, bits


def run_sift(
    params: ProtocolParams,
    rounds: int,
    strategy: BobStrategy = BobStrategy.HONEST,
    seed: int = 0,
    chunk_size: Optional[int] = None,
) -> SiftRun:
    """Simulate `rounds` protocol rounds and keep those with the target outcome.

    Args:
        params: Protocol parameters
        rounds: Number of photon pairs sent
        strategy: Honest Bob or the middle-state attack
        seed: Seed of the counter-based round stream
        chunk_size: Rounds sampled per vectorized batch; results do not
            depend on it

    Returns:
        A SiftRun; zero retained rounds give an empty run, not an error

    Raises:
        ValidationError: If rounds or chunk_size is not positive
        InvariantViolationError: If an honest conclusive round disagrees
            with Bob's bit
    """
    if rounds < 1:
        raise ValidationError(f"rounds must be positive, got {rounds}")
    chunk_size = chunk_size or simulation_config.chunk_size
    if chunk_size < 1:
        raise ValidationError(f"chunk_size must be positive, got {chunk_size}")
    seed = check_seed(seed)

    ensemble = ensemble_for(params)
    bob_family = bob_states_for(params, strategy)
    tensor = outcome_tensor(ensemble.states, bob_family.states, bell_basis(params.dim))
    cdf = np.cumsum(tensor, axis=2)
    cdf = cdf / cdf[..., -1:]
    n_alice, n_bob, n_outcomes = tensor.shape
    target = params.target

    stream = RoundStream(seed)
    kept: List[np.ndarray] = []
    for start in range(0, rounds, chunk_size):
        count = min(chunk_size, rounds - start)
        u = stream.uniforms(start, count)
        alice = _pick(u[:, 0], n_alice)
        bob = _pick(u[:, 1], n_bob)
        outcome = (cdf[alice, bob] <= u[:, 2:3]).sum(axis=1)
        outcome = np.minimum(outcome, n_outcomes - 1)
        mask = outcome == target
        index = np.arange(start, start + count)[mask]
        kept.append(np.stack([index, alice[mask], bob[mask], u[mask, 3] < 0.5], 1))

    retained = np.concatenate(kept).astype(np.int64)
    round_index, alice, bob, coin = (retained[:, k] for k in range(4))

    verdicts = verdict_table(params)
    conclusive_lookup, degenerate_lookup, bit_lookup = _verdict_arrays(verdicts)

    announced = np.asarray(announcements_for(params, strategy), dtype=np.int64)
    announcement = announced[bob]
    conclusive = conclusive_lookup[alice, announcement]
    degenerate = degenerate_lookup[alice, announcement]
    alice_bit = bit_lookup[alice, announcement]

    if strategy == BobStrategy.HONEST:
        bob_bit = np.asarray(ensemble.basis_of, dtype=np.int64)[bob]
        if np.any(conclusive & (alice_bit != bob_bit)):
            raise InvariantViolationError(
                "An honest conclusive round disagrees with Bob's basis bit"
            )
    else:
        inserted = insertion_bits(params)[bob]
        bob_bit = np.where(inserted == NO_BIT, coin, inserted)

    run = SiftRun(
        params=params,
        strategy=strategy,
        seed=seed,
        rounds=rounds,
        round_index=round_index,
        alice_state=alice,
        bob_state=bob,
        bsm_outcome=np.full(round_index.size, target, dtype=np.int64),
        announcement=announcement,
        conclusive=conclusive,
        degenerate=degenerate,
        alice_bit=alice_bit,
        bob_bit=bob_bit,
        verdicts=verdicts,
    )
    if run.retained_count == 0:
        logger.warning(f"No round out of {rounds} produced Bell outcome {target}")
    if run.degenerate_count:
        logger.warning(
            f"{run.degenerate_count} retained rounds excluded both candidates"
        )
    logger.info(
        f"Sifted {run.retained_count}/{rounds} rounds "
        f"({strategy.value}), {run.conclusive_count} conclusive"
    )
    return run
