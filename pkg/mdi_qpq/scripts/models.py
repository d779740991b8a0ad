"""Command-line run configuration."""

from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import click

from mdi_qpq.qstate.models import EnsembleKind, ProtocolParams

STOCHASTIC_COMMANDS = ("simulate", "attack", "query")


@dataclass
class RunConfig:
    """Flags of one invocation, checked against subcommand and dimension."""

    subcommand: str
    dim: int = 3
    gamma1: Optional[float] = None
    gamma2: Optional[float] = None
    theta: Optional[float] = None
    fourier: bool = False
    outcome: Optional[int] = None
    rounds: Optional[int] = None
    seed: Optional[int] = None
    test_fraction: Optional[float] = None
    threshold: Optional[float] = None
    output: Optional[Path] = None
    fmt: str = "csv"
    database: Optional[Path] = None
    raw_bytes: bool = False
    query_index: Optional[int] = None
    transcript: Optional[Path] = None

    def validate(self) -> None:
        """Raise click.UsageError for flag combinations that make no sense."""
        self._validate_geometry()
        self._validate_command()

    def _validate_geometry(self) -> None:
        if self.dim not in (2, 3):
            raise click.UsageError(f"--dim must be 2 or 3, got {self.dim}")
        if self.fourier and self.dim != 3:
            raise click.UsageError("--fourier is only defined for --dim 3")
        if self.dim == 2 and (self.gamma1 is not None or self.gamma2 is not None):
            raise click.UsageError("--gamma1/--gamma2 need --dim 3; use --theta")
        if self.dim == 3 and self.theta is not None:
            raise click.UsageError("--theta needs --dim 2; use --gamma1/--gamma2")
        if self.fourier and (self.gamma1 is not None or self.gamma2 is not None):
            raise click.UsageError("--fourier takes no angles")
        if self.dim == 3 and not self.fourier:
            if self.gamma1 is None or self.gamma2 is None:
                raise click.UsageError("--gamma1 and --gamma2 are required")
        if self.dim == 2 and self.theta is None:
            raise click.UsageError("--theta is required for --dim 2")

    def _validate_command(self) -> None:
        if self.subcommand in STOCHASTIC_COMMANDS and self.seed is None:
            raise click.UsageError(f"{self.subcommand} requires --seed")
        if self.subcommand == "attack" and self.fourier:
            raise click.UsageError("The Fourier ensemble has no middle-state attack")
        if self.subcommand == "query":
            if self.database is None or self.query_index is None:
                raise click.UsageError("query requires --db and --index")

    def params(self) -> ProtocolParams:
        """Protocol parameters for the validated flags."""
        if self.fourier:
            return ProtocolParams(
                dim=3,
                ensemble_kind=EnsembleKind.FOURIER,
                target_bell_index=self.outcome,
            )
        if self.dim == 3:
            assert self.gamma1 is not None and self.gamma2 is not None
            return ProtocolParams.qutrit(self.gamma1, self.gamma2, self.outcome)
        assert self.theta is not None
        return ProtocolParams.qubit(self.theta, self.outcome)
