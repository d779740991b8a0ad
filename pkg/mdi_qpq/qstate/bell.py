"""Generalized Bell bases and Bell-state measurement probabilities."""

import cmath
import math
from functools import lru_cache
from typing import Sequence

import numpy as np

from mdi_qpq.exceptions import DimensionMismatchError, DomainError

from .models import SUPPORTED_DIMENSIONS, BellBasis, StateVector


@lru_cache(maxsize=None)
def bell_basis(dim: int) -> BellBasis:
    """Return the d² maximally entangled states for d in {2, 3}.

    Member d·k + l = (1/√d) Σ_m ω^{ml} |m+k mod d, m>, ω = e^{2πi/d}. For
    d = 2 member 3 is (|10> − |01>)/√2, the |ψ−> projector up to sign.

    Raises:
        DomainError: If dim is not 2 or 3
    """
    if dim not in SUPPORTED_DIMENSIONS:
        raise DomainError(f"Unsupported dimension for a Bell basis: {dim}")

    omega = cmath.exp(2j * math.pi / dim)
    norm = 1 / math.sqrt(dim)
    states = []
    for k in range(dim):
        for l in range(dim):  # noqa: E741
            amplitudes = np.zeros(dim * dim, dtype=np.complex128)
            for m in range(dim):
                amplitudes[((m + k) % dim) * dim + m] = norm * omega ** (m * l)
            states.append(StateVector.from_components(amplitudes))
    return BellBasis(dim=dim, states=tuple(states), omega=omega)


def _check_dims(a: StateVector, b: StateVector, bell: BellBasis) -> None:
    if not a.dim == b.dim == bell.dim:
        raise DimensionMismatchError(
            f"Alice dim {a.dim}, Bob dim {b.dim}, Bell basis dim {bell.dim}"
        )


def bsm_distribution(a: StateVector, b: StateVector, bell: BellBasis) -> np.ndarray:
    """Outcome probabilities |<φ_i| b ⊗ a>|² for all d² Bell outcomes.

    a is Alice's photon, b is Bob's; Bob occupies the first tensor slot.
    """
    _check_dims(a, b, bell)
    product = b.tensor(a)
    probabilities: np.ndarray = np.abs(bell.matrix.conj() @ product.vector) ** 2
    return probabilities


def bsm_probability(
    a: StateVector, b: StateVector, bell: BellBasis, outcome: int
) -> float:
    """Probability that Charlie announces Bell state `outcome`.

    Raises:
        DimensionMismatchError: If a, b and bell disagree on dimension
        DomainError: If outcome is not a Bell index
    """
    _check_dims(a, b, bell)
    if not 0 <= outcome < len(bell):
        raise DomainError(f"Bell outcome {outcome} outside 0..{len(bell) - 1}")
    overlap = bell.states[outcome].inner(b.tensor(a))
    return float(abs(overlap) ** 2)


def outcome_tensor(
    alice_states: Sequence[StateVector],
    bob_states: Sequence[StateVector],
    bell: BellBasis,
) -> np.ndarray:
    """Array [a, b, outcome] of BSM probabilities over two state families."""
    return np.array(
        [[bsm_distribution(a, b, bell) for b in bob_states] for a in alice_states]
    )
