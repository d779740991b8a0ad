"""The private query: shift announcement, one-time pad and decryption."""

import logging
from typing import Optional, Sequence

import numpy as np

from mdi_qpq.config import simulation_config
from mdi_qpq.exceptions import SessionAbortedError, ValidationError
from mdi_qpq.qstate.models import ProtocolParams
from mdi_qpq.sift.models import BobStrategy

from .engine import run_sift
from .models import KeyRecord, QueryRun, QuerySession
from .reconciliation import estimate_qber
from .streams import StreamTag, substream

logger = logging.getLogger(__name__)


def _as_bits(bits: Sequence[int], name: str) -> np.ndarray:
    array = np.asarray(bits, dtype=np.int64)
    if array.ndim != 1 or np.any((array != 0) & (array != 1)):
        raise ValidationError(f"{name} must be a flat sequence of 0/1 values")
    return array.astype(np.uint8)


def one_time_pad(bits: Sequence[int], key: Sequence[int]) -> np.ndarray:
    """Bitwise exclusive-or; applying it twice with the same key is the identity."""
    data = _as_bits(bits, "bits")
    pad = _as_bits(key, "key")
    if data.shape != pad.shape:
        raise ValidationError(
            f"Key length {pad.size} differs from data length {data.size}"
        )
    return np.bitwise_xor(data, pad)


def effective_key(bob_key: Sequence[int], size: int) -> np.ndarray:
    """Bob's key cyclically extended or truncated to `size` bits."""
    key = _as_bits(bob_key, "key")
    if key.size == 0:
        raise SessionAbortedError("Empty key; restart the key establishment")
    return key[np.arange(size) % key.size]


def private_query(
    record: KeyRecord, database: Sequence[int], query_index: int, seed: int
) -> QuerySession:
    """Retrieve database[query_index] with one of Alice's usable key bits.

    Alice picks j among her usable positions, announces s = (j − i) mod N,
    Bob pads the database with his key shifted by s, and Alice decrypts
    position i with her bit at j.

    Raises:
        ValidationError: If the database is empty or the index is out of range
        SessionAbortedError: If Alice holds no usable bit inside the database
            length
    """
    db = _as_bits(database, "database")
    size = db.size
    if size == 0:
        raise ValidationError("Database is empty")
    if not 0 <= query_index < size:
        raise ValidationError(f"Query index {query_index} outside 0..{size - 1}")

    candidates = [p for p in record.usable_positions() if p < size]
    if not candidates:
        logger.error("Alice holds no usable conclusive bit")
        raise SessionAbortedError(
            "No usable conclusive key bit; restart the key establishment"
        )

    rng = substream(seed, StreamTag.QUERY)
    j = candidates[int(rng.integers(len(candidates)))]
    shift = (j - query_index) % size

    key = effective_key(record.bob_key, size)
    shifted = np.roll(key, -shift)
    ciphertext = one_time_pad(db, shifted)
    recovered = int(ciphertext[query_index]) ^ record.alice_known[j]

    session = QuerySession(
        database=tuple(int(b) for b in db),
        query_index=query_index,
        alice_position=j,
        shift=shift,
        shifted_key=tuple(int(b) for b in shifted),
        ciphertext=tuple(int(b) for b in ciphertext),
        recovered_bit=recovered,
    )
    logger.info(f"Queried bit {query_index} through position {j} (shift {shift})")
    return session


def run_query_session(
    params: ProtocolParams,
    database: Sequence[int],
    query_index: int,
    rounds: int,
    seed: int,
    test_fraction: Optional[float] = None,
    strategy: BobStrategy = BobStrategy.HONEST,
) -> QueryRun:
    """Key establishment, error estimation and one private query."""
    test_fraction = test_fraction or simulation_config.test_fraction
    run = run_sift(params, rounds, strategy, seed)
    estimate, record = estimate_qber(run.record, test_fraction, seed)
    session = private_query(record, database, query_index, seed)
    return QueryRun(run=run, estimate=estimate, record=record, session=session)
