import math
from typing import Callable

import numpy as np
import pytest

from mdi_qpq.qstate.models import HALF_PI, ProtocolParams

# Statistical checks use fixed seeds and this many binomial standard deviations
SIGMA_BAND = 4.0


@pytest.fixture
def within_band() -> Callable[[float, float, int], bool]:
    """Whether an observed fraction lies within SIGMA_BAND of p over n trials."""

    def check(observed: float, p: float, n: int) -> bool:
        assert n > 0
        sigma = math.sqrt(p * (1 - p) / n)
        return abs(observed - p) <= SIGMA_BAND * sigma

    return check


@pytest.fixture
def corner_qutrit() -> ProtocolParams:
    return ProtocolParams.qutrit(HALF_PI, HALF_PI)


@pytest.fixture
def generic_qutrit() -> ProtocolParams:
    return ProtocolParams.qutrit(math.pi / 3, math.pi / 6)


@pytest.fixture
def quarter_qubit() -> ProtocolParams:
    return ProtocolParams.qubit(math.pi / 4)


@pytest.fixture
def random_angle_pairs() -> np.ndarray:
    """Twenty interior (γ1, γ2) pairs away from the boundary."""
    rng = np.random.default_rng(2024)
    return rng.uniform(0.05, HALF_PI - 0.05, size=(20, 2))
