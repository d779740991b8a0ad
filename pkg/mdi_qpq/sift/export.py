"""Serialization of probability tables to CSV rows and JSON documents."""

import math
from typing import Any, Dict, List

from mdi_qpq.config import numerics_config

from .models import ProbabilityTable

SIGNIFICANT_DIGITS = 12


def format_probability(value: float) -> str:
    """Decimal with 12 significant digits; rounding residue prints as zero."""
    if abs(value) <= numerics_config.zero_tolerance:
        value = 0.0
    if value == 0.0:
        return f"{0.0:.{SIGNIFICANT_DIGITS}f}"
    exponent = math.floor(math.log10(abs(value)))
    decimals = max(SIGNIFICANT_DIGITS - 1 - exponent, 0)
    return f"{value:.{decimals}f}"


def table_to_rows(table: ProbabilityTable) -> List[List[str]]:
    """Header row of Bob's labels, then one row per Alice state."""
    rows = [["alice\\bob", *table.col_labels]]
    for label, entries in zip(table.row_labels, table.entries, strict=True):
        rows.append([label, *(format_probability(float(x)) for x in entries)])
    return rows


def table_to_dict(table: ProbabilityTable) -> Dict[str, Any]:
    """JSON-ready view of a table, cells formatted like the CSV output."""
    return {
        "row_labels": list(table.row_labels),
        "col_labels": list(table.col_labels),
        "normalized": table.normalized,
        "norm_constant": format_probability(table.norm_constant),
        "entries": [row[1:] for row in table_to_rows(table)[1:]],
    }
