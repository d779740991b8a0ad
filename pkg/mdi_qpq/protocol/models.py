"""Models for protocol runs, key records, query sessions and attack reports."""

from dataclasses import dataclass, field, replace
from typing import Any, Dict, FrozenSet, Iterator, List, Optional, Tuple

import numpy as np

from mdi_qpq.exceptions import InvariantViolationError
from mdi_qpq.qstate.models import ProtocolParams
from mdi_qpq.sift.models import BobStrategy, ConclusiveVerdict


def params_to_dict(params: ProtocolParams) -> Dict[str, Any]:
    """JSON-ready view of protocol parameters."""
    data: Dict[str, Any] = {
        "dim": params.dim,
        "ensemble_kind": params.ensemble_kind.value,
        "target_bell_index": params.target,
    }
    for name in ("gamma1", "gamma2", "theta"):
        value = getattr(params, name)
        if value is not None:
            data[name] = value
    return data


@dataclass(frozen=True)
class SiftRound:
    """One retained round: the Bell outcome equalled the target."""

    round_index: int
    alice_state: int
    bob_state: int
    bsm_outcome: int
    announced_index: int
    verdict: ConclusiveVerdict
    bob_key_bit: int

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for JSON serialization."""
        data: Dict[str, Any] = {
            "round": self.round_index,
            "alice_state": self.alice_state,
            "bob_state": self.bob_state,
            "bsm_outcome": self.bsm_outcome,
            "announced_index": self.announced_index,
            "conclusive": self.verdict.conclusive,
            "bob_key_bit": self.bob_key_bit,
        }
        if self.verdict.conclusive:
            data["alice_key_bit"] = self.verdict.inferred_key_bit
        if self.verdict.degenerate:
            data["degenerate"] = True
        return data


@dataclass(frozen=True)
class KeyRecord:
    """Bob's raw key over the retained rounds and what Alice knows of it.

    Positions are indices into bob_key; sifted_rounds[p] is the round that
    produced position p.
    """

    rounds: int
    sifted_rounds: Tuple[int, ...]
    bob_key: Tuple[int, ...]
    alice_known: Dict[int, int]
    disclosed: FrozenSet[int] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        if len(self.sifted_rounds) != len(self.bob_key):
            raise InvariantViolationError("One key bit per sifted round is required")
        length = len(self.bob_key)
        if any(not 0 <= p < length for p in self.alice_known):
            raise InvariantViolationError("Alice knows a position outside the key")
        if not self.disclosed <= set(self.alice_known):
            raise InvariantViolationError("Only Alice's known positions can be tested")

    @property
    def key_length(self) -> int:
        return len(self.bob_key)

    @property
    def is_empty(self) -> bool:
        return not self.bob_key

    def usable_positions(self) -> List[int]:
        """Alice's known positions that error estimation has not disclosed."""
        return sorted(p for p in self.alice_known if p not in self.disclosed)

    def with_disclosed(self, positions: FrozenSet[int]) -> "KeyRecord":
        return replace(self, disclosed=self.disclosed | positions)


@dataclass(frozen=True, eq=False)
class SiftRun:
    """Arrays over the retained rounds of one seeded run."""

    params: ProtocolParams
    strategy: BobStrategy
    seed: int
    rounds: int
    round_index: np.ndarray
    alice_state: np.ndarray
    bob_state: np.ndarray
    bsm_outcome: np.ndarray
    announcement: np.ndarray
    conclusive: np.ndarray
    degenerate: np.ndarray
    alice_bit: np.ndarray
    bob_bit: np.ndarray
    verdicts: Tuple[Tuple[ConclusiveVerdict, ...], ...] = field(repr=False)

    @property
    def retained_count(self) -> int:
        return int(self.round_index.size)

    @property
    def conclusive_count(self) -> int:
        return int(self.conclusive.sum())

    @property
    def degenerate_count(self) -> int:
        return int(self.degenerate.sum())

    @property
    def conclusive_rate(self) -> Optional[float]:
        """Conclusive fraction among retained rounds; None if none were retained."""
        if self.retained_count == 0:
            return None
        return self.conclusive_count / self.retained_count

    @property
    def retention_rate(self) -> float:
        return self.retained_count / self.rounds

    def sift_rounds(self) -> Iterator[SiftRound]:
        for p in range(self.retained_count):
            yield SiftRound(
                round_index=int(self.round_index[p]),
                alice_state=int(self.alice_state[p]),
                bob_state=int(self.bob_state[p]),
                bsm_outcome=int(self.bsm_outcome[p]),
                announced_index=int(self.announcement[p]),
                verdict=self.verdicts[int(self.alice_state[p])][
                    int(self.announcement[p])
                ],
                bob_key_bit=int(self.bob_bit[p]),
            )

    @property
    def record(self) -> KeyRecord:
        positions = np.flatnonzero(self.conclusive)
        return KeyRecord(
            rounds=self.rounds,
            sifted_rounds=tuple(int(r) for r in self.round_index),
            bob_key=tuple(int(b) for b in self.bob_bit),
            alice_known={int(p): int(self.alice_bit[p]) for p in positions},
        )

    def summary(self) -> Dict[str, Any]:
        return {
            "params": params_to_dict(self.params),
            "strategy": self.strategy.value,
            "seed": self.seed,
            "rounds": self.rounds,
            "retained": self.retained_count,
            "conclusive": self.conclusive_count,
            "degenerate": self.degenerate_count,
            "conclusive_rate": self.conclusive_rate,
        }


@dataclass(frozen=True)
class QberEstimate:
    """Outcome of comparing a disclosed sample of Alice's conclusive bits."""

    tested_positions: Tuple[int, ...]
    mismatches: int
    test_fraction: float

    @property
    def tested(self) -> int:
        return len(self.tested_positions)

    @property
    def qber(self) -> Optional[float]:
        """Mismatch fraction; None when there was nothing to test."""
        if not self.tested_positions:
            return None
        return self.mismatches / self.tested

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for JSON serialization."""
        return {
            "tested": self.tested,
            "mismatches": self.mismatches,
            "test_fraction": self.test_fraction,
            "qber": self.qber,
        }


@dataclass(frozen=True)
class QuerySession:
    """One private query of database bit i through Alice's key bit at j."""

    database: Tuple[int, ...]
    query_index: int
    alice_position: int
    shift: int
    shifted_key: Tuple[int, ...]
    ciphertext: Tuple[int, ...]
    recovered_bit: int

    @property
    def correct(self) -> bool:
        return self.recovered_bit == self.database[self.query_index]

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for JSON serialization."""
        return {
            "database_size": len(self.database),
            "query_index": self.query_index,
            "alice_position": self.alice_position,
            "shift": self.shift,
            "recovered_bit": self.recovered_bit,
            "expected_bit": self.database[self.query_index],
            "correct": self.correct,
        }


@dataclass(frozen=True)
class PositionGuessReport:
    """How well dishonest Bob locates the key position Alice will use.

    exact_success is the success probability of Bob's strategy given the
    record; baseline is uniform guessing over retained undisclosed positions.
    """

    sessions: int
    candidates: int
    top_positions: int
    usable_positions: int
    hits: int
    exact_success: float
    baseline: float
    usable_reference: float

    @property
    def hit_fraction(self) -> float:
        return self.hits / self.sessions

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for JSON serialization."""
        return {
            "sessions": self.sessions,
            "candidates": self.candidates,
            "top_positions": self.top_positions,
            "usable_positions": self.usable_positions,
            "hits": self.hits,
            "hit_fraction": self.hit_fraction,
            "exact_success": self.exact_success,
            "baseline": self.baseline,
            "usable_reference": self.usable_reference,
        }


@dataclass(frozen=True)
class AttackReport:
    """Observed and closed-form figures of one middle-state attack run."""

    mode: str
    conclusive_rate_observed: Optional[float]
    conclusive_rate_expected: float
    qber_observed: Optional[float]
    qber_expected: float
    qber_expected_declared: float
    threshold: float
    detected: bool
    per_state_qber: Dict[str, Optional[float]]
    per_state_qber_expected: Dict[str, float]
    estimate: QberEstimate
    guess: Optional[PositionGuessReport] = None
    run: Optional[SiftRun] = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        observed = self.qber_observed
        flagged = observed is not None and observed >= self.threshold
        if self.detected != flagged:
            raise InvariantViolationError("detected must equal qber >= threshold")

    @property
    def bob_guess_success(self) -> Optional[float]:
        return self.guess.hit_fraction if self.guess else None

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for JSON serialization."""
        return {
            "mode": self.mode,
            "conclusive_rate_observed": self.conclusive_rate_observed,
            "conclusive_rate_expected": self.conclusive_rate_expected,
            "qber_observed": self.qber_observed,
            "qber_expected": self.qber_expected,
            "qber_expected_declared": self.qber_expected_declared,
            "threshold": self.threshold,
            "detected": self.detected,
            "per_state_qber": self.per_state_qber,
            "per_state_qber_expected": self.per_state_qber_expected,
            "estimate": self.estimate.to_dict(),
            "bob_guess_success": self.bob_guess_success,
            "guess": self.guess.to_dict() if self.guess else None,
        }


@dataclass(frozen=True)
class QueryRun:
    """Sift run, error estimation and query of one end-to-end session."""

    run: SiftRun
    estimate: QberEstimate
    record: KeyRecord
    session: QuerySession

    def summary(self) -> Dict[str, Any]:
        return {
            **self.run.summary(),
            "qber": self.estimate.to_dict(),
            "usable_positions": len(self.record.usable_positions()),
            "query": self.session.to_dict(),
        }
