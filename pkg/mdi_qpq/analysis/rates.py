"""Closed-form security quantities.

Every function here accepts plain floats or numpy arrays of angles and
evaluates elementwise, so the grid scan can reuse them unchanged.
"""

import math
from typing import Tuple, Union

import numpy as np

from mdi_qpq.exceptions import DomainError, InvariantViolationError
from mdi_qpq.qstate.models import HALF_PI, ProtocolParams
from mdi_qpq.sift.models import BobStrategy
from mdi_qpq.sift.rules import conclusive_bit_masses, conclusive_rate_from_table

Angle = Union[float, np.ndarray]

# Conjugate-basis qubit protocol: θ = π/4
QUBIT_FOURIER_THETA = math.pi / 4


def _check(*angles: Angle) -> None:
    for angle in angles:
        values = np.asarray(angle, dtype=np.float64)
        if not np.all(np.isfinite(values)) or np.any(values < 0) or np.any(
            values > HALF_PI
        ):
            raise DomainError(f"Angles must lie in [0, π/2], got {angle}")


def _out(value: np.ndarray) -> Angle:
    return float(value) if np.ndim(value) == 0 else value


def honest_rate_qutrit(gamma1: Angle, gamma2: Angle) -> Angle:
    """p(γ1, γ2) = (1/6)(2sin²γ1 + 2sin²γ2 − sin²γ1 sin²γ2)."""
    _check(gamma1, gamma2)
    s1 = np.sin(gamma1) ** 2
    s2 = np.sin(gamma2) ** 2
    return _out((2 * s1 + 2 * s2 - s1 * s2) / 6)


def honest_rate_qubit(theta: Angle) -> Angle:
    """p′(θ) = sin²θ / 2."""
    _check(theta)
    return _out(np.sin(theta) ** 2 / 2)


def region_predicates(gamma1: Angle, gamma2: Angle) -> Tuple[Angle, Angle]:
    """The two sign expressions whose negativity defines R1 and R2."""
    _check(gamma1, gamma2)
    s1 = np.sin(gamma1) ** 2
    s2 = np.sin(gamma2) ** 2
    return _out(-s1 + 2 * s2 - s1 * s2), _out(2 * s1 - s2 - s1 * s2)


def region_membership(gamma1: Angle, gamma2: Angle) -> Tuple[Angle, Angle]:
    """(in_R1, in_R2): whether the qutrit rate beats p′ at θ = γ1, resp. θ = γ2.

    The predicate is 6·(p − p′) up to the positive factor, so membership and
    the direct rate comparison agree; a disagreement raises.
    """
    r1, r2 = region_predicates(gamma1, gamma2)
    in_r1 = np.asarray(r1) < 0
    in_r2 = np.asarray(r2) < 0

    p = np.asarray(honest_rate_qutrit(gamma1, gamma2))
    direct_r1 = p < np.asarray(honest_rate_qubit(gamma1))
    direct_r2 = p < np.asarray(honest_rate_qubit(gamma2))
    # Only cells away from the boundary can be compared reliably
    margin = 1e-12
    decided_r1 = np.abs(np.asarray(r1)) > margin
    decided_r2 = np.abs(np.asarray(r2)) > margin
    if np.any((in_r1 != direct_r1) & decided_r1) or np.any(
        (in_r2 != direct_r2) & decided_r2
    ):
        raise InvariantViolationError(
            "Region predicate disagrees with the rate comparison"
        )

    if in_r1.ndim == 0:
        return bool(in_r1), bool(in_r2)
    return in_r1, in_r2


def attack_bit_probabilities(gamma1: Angle, gamma2: Angle) -> Tuple[Angle, Angle]:
    """(p0, p1) for middle state |0''> declared as 1; p0 < p1 on the open square."""
    _check(gamma1, gamma2)
    c1, s1 = np.cos(gamma1), np.sin(gamma1)
    ch1, sh1 = np.cos(np.asarray(gamma1) / 2), np.sin(np.asarray(gamma1) / 2)
    ch2, sh2 = np.cos(np.asarray(gamma2) / 2), np.sin(np.asarray(gamma2) / 2)
    cross = c1 * ch1 + s1 * sh1 * ch2
    p0 = (cross**2 + sh1**2 * sh2**2) / 2
    p1 = (ch1**2 + sh1**2 * sh2**2) / 2
    return _out(p0), _out(p1)


def attack_rate_qutrit(gamma1: Angle, gamma2: Angle) -> Angle:
    """p_c^mid, Alice's conclusive rate when Bob sends qutrit middle states."""
    _check(gamma1, gamma2)
    c1, s1 = np.cos(gamma1), np.sin(gamma1)
    ch1, sh1 = np.cos(np.asarray(gamma1) / 2), np.sin(np.asarray(gamma1) / 2)
    ch2, sh2 = np.cos(np.asarray(gamma2) / 2), np.sin(np.asarray(gamma2) / 2)
    cross = c1 * ch1 + s1 * sh1 * ch2
    total = (
        2
        + 2 * sh1**2 * sh2**2
        + 2 * ch1**2 * ch2**2
        + c1**2 * sh2**2
        + cross**2
    )
    return _out(total / 6)


def attack_rate_qubit(theta: Angle) -> Angle:
    """p_c,mid = cos²(θ/2)."""
    _check(theta)
    return _out(np.cos(np.asarray(theta) / 2) ** 2)


def attack_bit_probabilities_qubit(theta: Angle) -> Tuple[Angle, Angle]:
    """(p0, p1) for the qubit attack; both equal cos²(θ/2)/2."""
    half = attack_rate_qubit(theta)
    return _out(np.asarray(half) / 2), _out(np.asarray(half) / 2)


def expected_attack_qber(gamma1: Angle, gamma2: Angle) -> Angle:
    """Mismatch fraction p0/(p0+p1) of the declared |0''> instance."""
    p0, p1 = attack_bit_probabilities(gamma1, gamma2)
    return _out(np.asarray(p0) / (np.asarray(p0) + np.asarray(p1)))


def expected_attack_qber_overall(params: ProtocolParams) -> float:
    """Pooled mismatch when Bob inserts, per middle state, Alice's likelier bit.

    Ties (random insertion) contribute half the state's conclusive mass, which
    equals the smaller of the two bit masses.
    """
    masses = conclusive_bit_masses(params, BobStrategy.MIDDLE_ATTACK)
    return float(masses.min(axis=1).sum() / masses.sum())


def fourier_rate() -> float:
    """Conclusive rate of the Fourier ensemble, summed from its normalized table."""
    return conclusive_rate_from_table(ProtocolParams.fourier())


def qubit_fourier_reference() -> float:
    """The qubit protocol's rate in conjugate bases, p′(π/4) = 1/4."""
    return float(honest_rate_qubit(QUBIT_FOURIER_THETA))


def detection_power(qber: float, threshold: float, test_bits: int) -> float:
    """P(observed mismatch fraction ≥ threshold) for Binomial(test_bits, qber)."""
    if test_bits < 1:
        raise DomainError("test_bits must be positive")
    if not 0 <= qber <= 1 or not 0 <= threshold <= 1:
        raise DomainError("qber and threshold must lie in [0, 1]")
    smallest = math.ceil(threshold * test_bits - 1e-9)
    if qber == 0:
        return 1.0 if smallest <= 0 else 0.0
    if qber == 1:
        return 1.0
    n = test_bits
    log_terms = np.array(
        [
            math.lgamma(n + 1)
            - math.lgamma(i + 1)
            - math.lgamma(n - i + 1)
            + i * math.log(qber)
            + (n - i) * math.log1p(-qber)
            for i in range(max(smallest, 0), n + 1)
        ]
    )
    return float(min(np.exp(log_terms).sum(), 1.0))
