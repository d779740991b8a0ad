import functools
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Optional, Tuple, TypeVar, cast

import click

from .config import paths
from .exceptions import (
    ConfigurationError,
    InvariantViolationError,
    SessionAbortedError,
    ValidationError,
)
from .io import to_json, write_text_atomic
from .qstate.models import HALF_PI
from .scripts.models import RunConfig
from .scripts.scan import render_scan, render_summary, render_theta_scan
from .scripts.simulate import attack as attack_main
from .scripts.simulate import query as query_main
from .scripts.simulate import simulate as simulate_main
from .scripts.table import render_table

logger = logging.getLogger(__name__)

# Exit statuses; click itself exits with 2 on usage errors
EXIT_VALIDATION = 3
EXIT_ABORTED = 4
EXIT_CONFIGURATION = 5
EXIT_INTERNAL = 6

# Four-decimal renderings of an endpoint snap onto it
ANGLE_SNAP = 5e-5

F = TypeVar("F", bound=Callable[..., Any])


class AngleType(click.ParamType):
    """An angle in radians within [0, π/2]."""

    name = "radians"

    def convert(
        self, value: Any, param: Optional[click.Parameter], ctx: Optional[click.Context]
    ) -> float:
        try:
            angle = float(value)
        except (TypeError, ValueError):
            self.fail(f"{value!r} is not a number", param, ctx)
        if abs(angle) <= ANGLE_SNAP:
            return 0.0
        if abs(angle - HALF_PI) <= ANGLE_SNAP:
            return HALF_PI
        return angle


ANGLE = AngleType()


def handle_errors(func: F) -> F:
    """Map package errors onto exit statuses."""

    @functools.wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return func(*args, **kwargs)
        except SessionAbortedError as e:
            click.echo(f"Session aborted: {e}", err=True)
            sys.exit(EXIT_ABORTED)
        except ValidationError as e:
            click.echo(f"Error: {e}", err=True)
            sys.exit(EXIT_VALIDATION)
        except ConfigurationError as e:
            click.echo(f"Configuration error: {e}", err=True)
            sys.exit(EXIT_CONFIGURATION)
        except InvariantViolationError as e:
            click.echo(f"Internal consistency check failed: {e}", err=True)
            sys.exit(EXIT_INTERNAL)

    return cast(F, wrapper)


def _emit(text: str, output: Optional[Path]) -> None:
    """Write to output (relative to the output directory) or to stdout."""
    if output is None:
        click.echo(text, nl=False)
        return
    path = write_text_atomic(paths.resolve_output(output), text)
    click.echo(f"Wrote {path}", err=True)


def protocol_options(func: F) -> F:
    """Dimension, angle, ensemble and outcome flags shared by most commands."""
    options = [
        click.option("--dim", type=click.IntRange(2, 3), default=3, show_default=True),
        click.option("--gamma1", type=ANGLE, help="First qutrit basis angle"),
        click.option("--gamma2", type=ANGLE, help="Second qutrit basis angle"),
        click.option("--theta", type=ANGLE, help="Qubit basis angle"),
        click.option("--fourier", is_flag=True, help="Use the Fourier qutrit basis"),
        click.option("--outcome", type=int, help="Target Bell outcome index"),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def run_options(func: F) -> F:
    """Flags of the stochastic subcommands."""
    options = [
        click.option("--rounds", type=click.IntRange(min=1), help="Rounds to send"),
        click.option("--seed", type=click.IntRange(min=0), help="Random seed"),
        click.option(
            "--test-fraction",
            type=click.FloatRange(0, 1, min_open=True),
            help="Share of conclusive bits disclosed for error estimation",
        ),
        click.option(
            "--threshold", type=click.FloatRange(0, 1), help="QBER abort threshold"
        ),
        click.option("--output", "-o", type=click.Path(path_type=Path)),
        click.option(
            "--transcript", type=click.Path(path_type=Path), help="Transcript JSON"
        ),
    ]
    for option in reversed(options):
        func = option(func)
    return func


@click.group()
@click.option("--verbose", "-v", is_flag=True, help="Log progress to stderr")
def main(verbose: bool) -> None:
    """MDI quantum private query toolkit"""
    logging.basicConfig(
        level=logging.INFO if verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )


# Analytic Commands
@main.command()
@protocol_options
@click.option("--middle", is_flag=True, help="Bob's middle states as columns")
@click.option("--normalized", is_flag=True, help="Divide by the column sum")
@click.option(
    "--format", "fmt", type=click.Choice(["csv", "json"]), default="csv"
)
@click.option("--output", "-o", type=click.Path(path_type=Path))
@handle_errors
def table(
    middle: bool, normalized: bool, fmt: str, output: Optional[Path], **flags: Any
) -> None:
    """Print a target-outcome probability table"""
    config = RunConfig(subcommand="table", fmt=fmt, **flags)
    config.validate()
    if middle and config.fourier:
        raise click.UsageError("--middle is not defined for --fourier")
    _emit(render_table(config, middle, normalized), output)


@main.command()
@click.option(
    "--dim",
    type=click.IntRange(2, 3),
    default=3,
    show_default=True,
    help="3 scans (gamma1, gamma2); 2 sweeps the qubit theta",
)
@click.option("--step", type=float, help="Grid spacing in radians")
@click.option("--g1-min", type=ANGLE)
@click.option("--g1-max", type=ANGLE)
@click.option("--g2-min", type=ANGLE)
@click.option("--g2-max", type=ANGLE)
@click.option("--theta-min", type=ANGLE)
@click.option("--theta-max", type=ANGLE)
@click.option("--column", "columns", multiple=True, help="Keep only these columns")
@click.option("--output", "-o", type=click.Path(path_type=Path))
@handle_errors
def scan(
    dim: int,
    step: Optional[float],
    g1_min: Optional[float],
    g1_max: Optional[float],
    g2_min: Optional[float],
    g2_max: Optional[float],
    theta_min: Optional[float],
    theta_max: Optional[float],
    columns: Tuple[str, ...],
    output: Optional[Path],
) -> None:
    """Evaluate closed forms over a (gamma1, gamma2) grid or a theta sweep"""

    def bounds(
        low: Optional[float], high: Optional[float]
    ) -> Optional[Tuple[float, float]]:
        if low is None and high is None:
            return None
        return (low or 0.0, HALF_PI if high is None else high)

    qutrit_bounds = (g1_min, g1_max, g2_min, g2_max)
    if dim == 2:
        if any(value is not None for value in qutrit_bounds):
            raise click.UsageError("--g1-*/--g2-* apply to --dim 3 only")
        text = render_theta_scan(step, bounds(theta_min, theta_max), columns)
    else:
        if theta_min is not None or theta_max is not None:
            raise click.UsageError("--theta-min/--theta-max apply to --dim 2 only")
        text = render_scan(
            step, bounds(g1_min, g1_max), bounds(g2_min, g2_max), columns
        )
    _emit(text, output)


@main.command()
@click.option("--gamma1", type=ANGLE, required=True)
@click.option("--gamma2", type=ANGLE, required=True)
@click.option("--output", "-o", type=click.Path(path_type=Path))
@handle_errors
def summary(gamma1: float, gamma2: float, output: Optional[Path]) -> None:
    """Security figures of the qutrit protocol at one point"""
    _emit(render_summary(gamma1, gamma2), output)


# Protocol Simulation Commands
@main.command()
@protocol_options
@run_options
@handle_errors
def simulate(output: Optional[Path], **flags: Any) -> None:
    """Run the honest protocol and estimate the QBER"""
    config = RunConfig(subcommand="simulate", **flags)
    config.validate()
    _emit(to_json(simulate_main(config)), output)


@main.command()
@protocol_options
@run_options
@handle_errors
def attack(output: Optional[Path], **flags: Any) -> None:
    """Run the middle-state attack and report detection"""
    config = RunConfig(subcommand="attack", **flags)
    config.validate()
    _emit(to_json(attack_main(config)), output)


@main.command()
@protocol_options
@run_options
@click.option(
    "--db", "database", type=click.Path(path_type=Path), help="Database file"
)
@click.option("--bits", "raw_bytes", is_flag=True, help="Read the database as bytes")
@click.option("--index", "query_index", type=click.IntRange(min=0))
@handle_errors
def query(output: Optional[Path], **flags: Any) -> None:
    """Retrieve one database bit through a private query session"""
    config = RunConfig(subcommand="query", **flags)
    config.validate()
    _emit(to_json(query_main(config)), output)


if __name__ == "__main__":
    main()
