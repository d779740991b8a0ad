"""Counter-based random streams.

Round r always reads the Philox block at counter r + 1 under a key derived
from (seed, tag), so draws never depend on how rounds are chunked.
"""

from enum import IntEnum

import numpy as np

from mdi_qpq.exceptions import ValidationError

# Uniforms per round: Alice's state, Bob's state, the Bell outcome, Bob's bit
ROUND_WIDTH = 4
_MANTISSA_SHIFT = np.uint64(11)
_MANTISSA_SCALE = 2.0**-53


class StreamTag(IntEnum):
    """Independent purposes a single user seed feeds."""

    ROUNDS = 1
    TEST_SAMPLING = 2
    QUERY = 3
    GUESS = 4
    RUNS = 5


def check_seed(seed: int) -> int:
    if not isinstance(seed, (int, np.integer)) or isinstance(seed, bool) or seed < 0:
        raise ValidationError(f"Seed must be a non-negative integer, got {seed!r}")
    return int(seed)


def stream_key(seed: int, tag: StreamTag, *extra: int) -> np.ndarray:
    """128-bit Philox key for a (seed, tag, extra...) triple."""
    entropy = [check_seed(seed), int(tag), *(int(x) for x in extra)]
    return np.random.SeedSequence(entropy).generate_state(2, np.uint64)


class RoundStream:
    """Per-round uniforms addressed by round index."""

    def __init__(self, seed: int, tag: StreamTag = StreamTag.ROUNDS) -> None:
        self.key = stream_key(seed, tag)

    def uniforms(self, start: int, count: int) -> np.ndarray:
        """Array (count, ROUND_WIDTH) of uniforms in [0, 1) for rounds start.."""
        if start < 0 or count < 0:
            raise ValidationError(f"Invalid round range: start={start}, count={count}")
        generator = np.random.Philox(key=self.key, counter=start)
        raw = generator.random_raw(ROUND_WIDTH * count).reshape(count, ROUND_WIDTH)
        uniforms: np.ndarray = (raw >> _MANTISSA_SHIFT).astype(np.float64)
        return uniforms * _MANTISSA_SCALE


def substream(seed: int, tag: StreamTag, *extra: int) -> np.random.Generator:
    """A Generator for one secondary purpose, e.g. a single query session."""
    return np.random.Generator(np.random.Philox(key=stream_key(seed, tag, *extra)))


def derived_seed(seed: int, index: int) -> int:
    """Seed of the index-th repetition of a seeded experiment."""
    state = np.random.SeedSequence([check_seed(seed), int(StreamTag.RUNS), index])
    return int(state.generate_state(1, np.uint32)[0])
