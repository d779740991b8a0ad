"""Bodies of the stochastic subcommands: simulate, attack and query."""

import logging
from typing import Any, Dict, Tuple

from mdi_qpq.analysis.rates import detection_power
from mdi_qpq.config import paths, simulation_config
from mdi_qpq.io import load_database, to_json, write_text_atomic
from mdi_qpq.protocol.attack import run_attack_experiment
from mdi_qpq.protocol.engine import run_sift
from mdi_qpq.protocol.models import SiftRun
from mdi_qpq.protocol.query import run_query_session
from mdi_qpq.protocol.reconciliation import detect_attack, estimate_qber
from mdi_qpq.protocol.transcript import session_transcript
from mdi_qpq.sift.models import BobStrategy
from mdi_qpq.sift.rules import conclusive_rate_from_table

from .models import RunConfig

logger = logging.getLogger(__name__)


def _settings(config: RunConfig) -> Tuple[int, int, float, float]:
    assert config.seed is not None
    rounds = config.rounds or simulation_config.rounds
    test_fraction = config.test_fraction or simulation_config.test_fraction
    threshold = (
        simulation_config.threshold if config.threshold is None else config.threshold
    )
    return rounds, config.seed, test_fraction, threshold


def _save_transcript(config: RunConfig, run: SiftRun, summary: Dict[str, Any]) -> None:
    if config.transcript is None:
        return
    path = paths.resolve_output(config.transcript)
    write_text_atomic(path, to_json(session_transcript(run, summary)))


def simulate(config: RunConfig) -> Dict[str, Any]:
    """Honest run with error estimation; observed rates beside closed forms."""
    rounds, seed, test_fraction, threshold = _settings(config)
    params = config.params()
    run = run_sift(params, rounds, BobStrategy.HONEST, seed)
    estimate, _ = estimate_qber(run.record, test_fraction, seed)

    summary = {
        **run.summary(),
        "conclusive_rate_expected": conclusive_rate_from_table(params),
        "qber": estimate.to_dict(),
        "threshold": threshold,
        "detected": detect_attack(estimate.qber, threshold),
    }
    _save_transcript(config, run, summary)
    return summary


def attack(config: RunConfig) -> Dict[str, Any]:
    """Middle-state attack run with detection and Bob's position guessing."""
    rounds, seed, test_fraction, threshold = _settings(config)
    params = config.params()
    report = run_attack_experiment(params, rounds, seed, threshold, test_fraction)

    summary = report.to_dict()
    if report.estimate.tested:
        summary["detection_power_expected"] = detection_power(
            report.qber_expected, threshold, report.estimate.tested
        )
    if report.run is not None:
        _save_transcript(config, report.run, summary)
    return summary


def query(config: RunConfig) -> Dict[str, Any]:
    """End-to-end private query against a database file."""
    rounds, seed, test_fraction, _ = _settings(config)
    assert config.database is not None and config.query_index is not None
    params = config.params()
    database = load_database(config.database, config.raw_bytes)
    result = run_query_session(
        params, database, config.query_index, rounds, seed, test_fraction
    )
    summary = result.summary()
    summary["conclusive_rate_expected"] = conclusive_rate_from_table(params)
    summary["correct"] = result.session.correct
    _save_transcript(config, result.run, summary)
    return summary
