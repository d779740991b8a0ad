"""File I/O: atomic writes of JSON and CSV output, database ingestion."""

import contextlib
import csv
import io
import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Any, List, Optional, Sequence

import numpy as np

from mdi_qpq.exceptions import ValidationError

logger = logging.getLogger(__name__)


def write_text_atomic(path: Path, text: str) -> Path:
    """Write text through a temp file in the target directory, then rename.

    The temp file is removed if writing or renaming fails.
    """
    path.parent.mkdir(parents=True, exist_ok=True)
    temp_path: Optional[str] = None
    try:
        with tempfile.NamedTemporaryFile(
            "w",
            dir=path.parent,
            prefix=f".{path.name}.",
            delete=False,
            encoding="utf-8",
        ) as temp_file:
            temp_path = temp_file.name
            temp_file.write(text)
        os.replace(temp_path, path)
    except BaseException:
        if temp_path is not None:
            with contextlib.suppress(FileNotFoundError):
                os.unlink(temp_path)
        raise
    logger.info(f"Wrote {path}")
    return path


def to_json(data: Any) -> str:
    """Serialize with sorted keys so equal inputs give byte-identical output."""
    return json.dumps(data, indent=2, sort_keys=True, default=_json_default) + "\n"


def _json_default(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


def to_csv(rows: Sequence[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerows(rows)
    return buffer.getvalue()


def load_database(path: Path, raw_bytes: bool = False) -> List[int]:
    """Read a bit database.

    Args:
        path: File of ASCII 0/1 characters (whitespace ignored), or any file
            when raw_bytes is set
        raw_bytes: Unpack every byte into 8 bits, most significant first

    Raises:
        ValidationError: If the file is missing, empty or holds other characters
    """
    if not path.exists():
        raise ValidationError(f"Database file not found: {path}")

    if raw_bytes:
        data = np.frombuffer(path.read_bytes(), dtype=np.uint8)
        bits = [int(b) for b in np.unpackbits(data)]
    else:
        text = "".join(path.read_text(encoding="ascii", errors="replace").split())
        invalid = set(text) - {"0", "1"}
        if invalid:
            raise ValidationError(
                f"Database may only contain 0 and 1, found {sorted(invalid)}"
            )
        bits = [int(c) for c in text]

    if not bits:
        raise ValidationError(f"Database is empty: {path}")
    logger.info(f"Loaded {len(bits)} database bits from {path}")
    return bits
