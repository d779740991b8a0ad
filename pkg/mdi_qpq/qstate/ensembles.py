"""Construction of every state family the protocol and its attacks use."""

import cmath
import logging
import math
from functools import lru_cache
from typing import Sequence, Tuple

from mdi_qpq.exceptions import ConfigurationError

from .models import (
    BasisTag,
    LabeledStates,
    ProtocolParams,
    StateEnsemble,
    StateVector,
    check_angle,
)

logger = logging.getLogger(__name__)

QUTRIT_LABELS = ("|0>", "|1>", "|2>", "|0'>", "|1'>", "|2'>")
QUBIT_LABELS = ("|0>", "|1>", "|0'>", "|1'>")
QUTRIT_MIDDLE_LABELS = ("|0''>", "|1''>", "|2''>")
QUBIT_MIDDLE_LABELS = ("|0''>", "|1''>")


def _qutrit_triplet(a: float, b: float) -> Tuple[StateVector, ...]:
    """The unitary image of |0>, |1>, |2> for angles (a, b)."""
    return (
        StateVector.from_components(
            [math.cos(a), math.sin(a) * math.cos(b), math.sin(a) * math.sin(b)]
        ),
        StateVector.from_components(
            [-math.sin(a), math.cos(a) * math.cos(b), math.cos(a) * math.sin(b)]
        ),
        StateVector.from_components([0.0, -math.sin(b), math.cos(b)]),
    )


def _qubit_pair(angle: float) -> Tuple[StateVector, StateVector]:
    return (
        StateVector.from_components([math.cos(angle), math.sin(angle)]),
        StateVector.from_components([math.sin(angle), -math.cos(angle)]),
    )


def _with_computational(dim: int, second: Sequence[StateVector]) -> StateEnsemble:
    computational = [StateVector.basis_state(dim, level) for level in range(dim)]
    return StateEnsemble(
        dim=dim,
        states=tuple(computational) + tuple(second),
        labels=QUTRIT_LABELS if dim == 3 else QUBIT_LABELS,
        basis_of=(BasisTag.COMPUTATIONAL,) * dim + (BasisTag.ROTATED,) * dim,
        index_of=tuple(range(dim)) * 2,
    )


def rotated_qutrit_basis(gamma1: float, gamma2: float) -> StateEnsemble:
    """Return {|0>,|1>,|2>,|0'>,|1'>,|2'>} with |j'> = U(|j>).

    Raises:
        DomainError: If either angle lies outside [0, π/2]
    """
    check_angle(gamma1, "gamma1")
    check_angle(gamma2, "gamma2")
    return _with_computational(3, _qutrit_triplet(gamma1, gamma2))


def middle_qutrit_basis(gamma1: float, gamma2: float) -> LabeledStates:
    """Return dishonest Bob's half-angle states |0''>, |1''>, |2''>."""
    check_angle(gamma1, "gamma1")
    check_angle(gamma2, "gamma2")
    return LabeledStates(
        dim=3,
        states=_qutrit_triplet(gamma1 / 2, gamma2 / 2),
        labels=QUTRIT_MIDDLE_LABELS,
    )


def fourier_basis() -> StateEnsemble:
    """Return the computational basis plus its discrete Fourier partner.

    The second basis follows the listing |1'> = (|0> + ω²|1> + ω|2>)/√3 and
    |2'> = (|0> + ω|1> + ω²|2>)/√3.
    """
    omega = cmath.exp(2j * math.pi / 3)
    norm = 1 / math.sqrt(3)
    second = [
        StateVector.from_components([norm * omega ** ((-j * m) % 3) for m in range(3)])
        for j in range(3)
    ]
    return _with_computational(3, second)


def qubit_bases(theta: float) -> Tuple[StateEnsemble, LabeledStates]:
    """Return the four honest qubit states and the two middle states.

    |0'> = cos θ|0> + sin θ|1>, |1'> = sin θ|0> − cos θ|1>; the middle states
    use θ/2 in the same pattern.
    """
    check_angle(theta, "theta")
    honest = _with_computational(2, _qubit_pair(theta))
    middle = LabeledStates(
        dim=2, states=_qubit_pair(theta / 2), labels=QUBIT_MIDDLE_LABELS
    )
    return honest, middle


@lru_cache(maxsize=256)
def ensemble_for(params: ProtocolParams) -> StateEnsemble:
    """The honest ensemble both parties prepare from under params."""
    if params.is_fourier:
        return fourier_basis()
    if params.dim == 3:
        assert params.gamma1 is not None and params.gamma2 is not None
        return rotated_qutrit_basis(params.gamma1, params.gamma2)
    assert params.theta is not None
    return qubit_bases(params.theta)[0]


@lru_cache(maxsize=256)
def middle_states_for(params: ProtocolParams) -> LabeledStates:
    """The half-angle family a dishonest Bob sends under params.

    Raises:
        ConfigurationError: For the Fourier ensemble, which has no middle family
    """
    if params.is_fourier:
        raise ConfigurationError("The Fourier ensemble has no middle-state family")
    if params.dim == 3:
        assert params.gamma1 is not None and params.gamma2 is not None
        return middle_qutrit_basis(params.gamma1, params.gamma2)
    assert params.theta is not None
    return qubit_bases(params.theta)[1]
