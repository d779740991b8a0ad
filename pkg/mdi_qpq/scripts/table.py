from mdi_qpq.io import to_csv, to_json
from mdi_qpq.sift.export import table_to_dict, table_to_rows
from mdi_qpq.sift.tables import honest_table, middle_table, normalize_columns

from .models import RunConfig


def render_table(config: RunConfig, middle: bool, normalized: bool) -> str:
    """The requested probability table as CSV or JSON text."""
    params = config.params()
    table = middle_table(params) if middle else honest_table(params)
    if normalized:
        table = normalize_columns(table)
    if config.fmt == "json":
        return to_json(table_to_dict(table))
    return to_csv(table_to_rows(table))
