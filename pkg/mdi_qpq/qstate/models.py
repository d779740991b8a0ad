"""Value types for prepared photon states, ensembles and protocol parameters."""

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Optional, Sequence, Tuple

import numpy as np

from mdi_qpq.config import numerics_config
from mdi_qpq.exceptions import ConfigurationError, DomainError, ValidationError

SUPPORTED_DIMENSIONS = (2, 3)
HALF_PI = math.pi / 2

# Bell index of |phi_0> (k=0, l=0) and of the |psi-> projector (k=1, l=1, d=2)
PHI0_INDEX = 0
PSI_MINUS_INDEX = 3


class EnsembleKind(str, Enum):
    """Which second basis Alice and Bob prepare states from."""

    ROTATED = "rotated"
    FOURIER = "fourier"


class BasisTag(int, Enum):
    """Basis of a prepared state; doubles as the raw key bit it encodes."""

    COMPUTATIONAL = 0
    ROTATED = 1


@dataclass(frozen=True)
class StateVector:
    """A unit complex amplitude vector."""

    amplitudes: Tuple[complex, ...]

    def __post_init__(self) -> None:
        if not self.amplitudes:
            raise ValidationError("A state needs at least one amplitude")
        norm = sum(abs(a) ** 2 for a in self.amplitudes)
        if abs(norm - 1.0) > numerics_config.norm_tolerance:
            raise ValidationError(f"State is not normalized: |psi|^2 = {norm!r}")

    @classmethod
    def from_components(cls, components: Sequence[complex]) -> "StateVector":
        """Build a state from any sequence of numbers."""
        return cls(tuple(complex(c) for c in components))

    @classmethod
    def basis_state(cls, dim: int, level: int) -> "StateVector":
        """Return the computational basis state |level> of dimension dim."""
        if not 0 <= level < dim:
            raise ValidationError(f"Level {level} outside 0..{dim - 1}")
        return cls.from_components([1.0 if i == level else 0.0 for i in range(dim)])

    @property
    def dim(self) -> int:
        return len(self.amplitudes)

    @cached_property
    def vector(self) -> np.ndarray:
        """Amplitudes as a read-only complex numpy array."""
        array = np.array(self.amplitudes, dtype=np.complex128)
        array.setflags(write=False)
        return array

    def inner(self, other: "StateVector") -> complex:
        """Return <self|other>."""
        if other.dim != self.dim:
            raise ValidationError(f"Dimension mismatch: {self.dim} vs {other.dim}")
        return complex(np.vdot(self.vector, other.vector))

    def tensor(self, other: "StateVector") -> "StateVector":
        """Return |self> ⊗ |other>; component (r, c) sits at r * other.dim + c."""
        return StateVector.from_components(np.kron(self.vector, other.vector))


@dataclass(frozen=True)
class LabeledStates:
    """An ordered family of states of one dimension with symbolic names."""

    dim: int
    states: Tuple[StateVector, ...]
    labels: Tuple[str, ...]

    def __post_init__(self) -> None:
        if len(self.states) != len(self.labels):
            raise ValidationError("Every state needs exactly one label")
        for state in self.states:
            if state.dim != self.dim:
                raise ValidationError(
                    f"State of dimension {state.dim} in a dimension-{self.dim} family"
                )

    def __len__(self) -> int:
        return len(self.states)

    def label_index(self, label: str) -> int:
        """Return the position of a state given its label."""
        try:
            return self.labels.index(label)
        except ValueError as e:
            raise ValidationError(f"Unknown state label: {label}") from e

    def gram(self) -> np.ndarray:
        """Matrix of inner products <i|j> over the family."""
        matrix = np.array([s.vector for s in self.states])
        return matrix.conj() @ matrix.T


@dataclass(frozen=True)
class StateEnsemble(LabeledStates):
    """The 2·dim honest states: a computational and a second basis.

    basis_of[i] is the key bit state i encodes; index_of[i] is the trit or
    bit Bob announces when he has sent state i.
    """

    basis_of: Tuple[int, ...] = field(default=())
    index_of: Tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        super().__post_init__()
        if len(self.states) != 2 * self.dim:
            raise ValidationError(
                f"Ensemble needs {2 * self.dim} states, got {len(self.states)}"
            )
        if len(self.basis_of) != len(self.states) or len(self.index_of) != len(
            self.states
        ):
            raise ValidationError("basis_of and index_of must cover every state")
        for tag in BasisTag:
            indices = sorted(
                self.index_of[i] for i in range(len(self)) if self.basis_of[i] == tag
            )
            if indices != list(range(self.dim)):
                raise ValidationError(
                    f"Basis {tag.name} must announce each index 0..{self.dim - 1} once"
                )
        for tag in BasisTag:
            gram = self.basis_subset(tag).gram()
            if not np.allclose(
                gram, np.eye(self.dim), atol=numerics_config.norm_tolerance, rtol=0
            ):
                raise ValidationError(f"Basis {tag.name} is not orthonormal")

    def basis_subset(self, tag: BasisTag) -> LabeledStates:
        """The dim states of one basis, ordered by announcement index."""
        members = sorted(
            (self.index_of[i], i) for i in range(len(self)) if self.basis_of[i] == tag
        )
        return LabeledStates(
            dim=self.dim,
            states=tuple(self.states[i] for _, i in members),
            labels=tuple(self.labels[i] for _, i in members),
        )

    def candidates(self, announcement: int) -> Tuple[int, int]:
        """Indices of the computational and second-basis states for an announcement."""
        if not 0 <= announcement < self.dim:
            raise ValidationError(
                f"Announcement {announcement} outside 0..{self.dim - 1}"
            )
        computational = rotated = -1
        for i in range(len(self)):
            if self.index_of[i] != announcement:
                continue
            if self.basis_of[i] == BasisTag.COMPUTATIONAL:
                computational = i
            else:
                rotated = i
        return computational, rotated


@dataclass(frozen=True)
class BellBasis:
    """The d² maximally entangled states used by Charlie's measurement.

    Member d·k + l is (1/√d) Σ_m ω^{ml} |m+k mod d, m>, with the first slot
    holding Bob's photon and the second Alice's.
    """

    dim: int
    states: Tuple[StateVector, ...]
    omega: complex

    def __len__(self) -> int:
        return len(self.states)

    @cached_property
    def matrix(self) -> np.ndarray:
        """Rows are the Bell states' amplitude vectors."""
        rows = np.array([s.vector for s in self.states])
        rows.setflags(write=False)
        return rows


@dataclass(frozen=True)
class ProtocolParams:
    """Dimension, basis angles, ensemble kind and the recorded Bell outcome."""

    dim: int
    gamma1: Optional[float] = None
    gamma2: Optional[float] = None
    theta: Optional[float] = None
    ensemble_kind: EnsembleKind = EnsembleKind.ROTATED
    target_bell_index: Optional[int] = None

    def __post_init__(self) -> None:
        if self.dim not in SUPPORTED_DIMENSIONS:
            raise DomainError(f"Unsupported dimension: {self.dim}")
        if self.target_bell_index is None:
            default = PHI0_INDEX if self.dim == 3 else PSI_MINUS_INDEX
            object.__setattr__(self, "target_bell_index", default)
        self.validate(strict=False)

    @classmethod
    def qutrit(
        cls, gamma1: float, gamma2: float, target_bell_index: Optional[int] = None
    ) -> "ProtocolParams":
        return cls(
            dim=3,
            gamma1=gamma1,
            gamma2=gamma2,
            target_bell_index=target_bell_index,
        )

    @classmethod
    def qubit(
        cls, theta: float, target_bell_index: Optional[int] = None
    ) -> "ProtocolParams":
        return cls(dim=2, theta=theta, target_bell_index=target_bell_index)

    @classmethod
    def fourier(cls, target_bell_index: Optional[int] = None) -> "ProtocolParams":
        return cls(
            dim=3,
            ensemble_kind=EnsembleKind.FOURIER,
            target_bell_index=target_bell_index,
        )

    @property
    def target(self) -> int:
        assert self.target_bell_index is not None
        return self.target_bell_index

    @property
    def is_fourier(self) -> bool:
        return self.ensemble_kind == EnsembleKind.FOURIER

    def validate(self, strict: bool = True) -> None:
        """Check field consistency.

        Args:
            strict: Require angles in the open interval (0, π/2), as the
                protocol draws them; otherwise the closed endpoints pass.

        Raises:
            ConfigurationError: If fields do not match the declared dimension
            DomainError: If an angle or the target outcome is out of range
        """
        if self.is_fourier:
            if self.dim != 3:
                raise ConfigurationError("The Fourier ensemble exists for qutrits only")
            expected: Tuple[str, ...] = ()
        elif self.dim == 3:
            expected = ("gamma1", "gamma2")
        else:
            expected = ("theta",)

        for name in ("gamma1", "gamma2", "theta"):
            value = getattr(self, name)
            if name in expected and value is None:
                raise ConfigurationError(f"{name} is required for this protocol")
            if name not in expected and value is not None:
                raise ConfigurationError(f"{name} does not apply to this protocol")
            if value is not None:
                check_angle(value, name, strict=strict)

        if not 0 <= self.target < self.dim**2:
            raise DomainError(
                f"Bell outcome {self.target} outside 0..{self.dim**2 - 1}"
            )


def check_angle(value: float, name: str = "angle", strict: bool = False) -> float:
    """Raise DomainError unless value lies in [0, π/2] (or (0, π/2) if strict)."""
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value}")
    if strict and not 0 < value < HALF_PI:
        raise DomainError(f"{name} must lie in (0, π/2), got {value}")
    if not 0 <= value <= HALF_PI:
        raise DomainError(f"{name} must lie in [0, π/2], got {value}")
    return value
