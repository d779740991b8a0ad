import json
import os
from pathlib import Path

import numpy as np
import pytest

from mdi_qpq.exceptions import ValidationError
from mdi_qpq.io import load_database, to_csv, to_json, write_text_atomic


class TestLoadDatabase:
    def test_ascii_ignores_whitespace(self, tmp_path: Path) -> None:
        path = tmp_path / "db.txt"
        path.write_text("0101\n11 0\n")
        assert load_database(path) == [0, 1, 0, 1, 1, 1, 0]

    def test_raw_bytes(self, tmp_path: Path) -> None:
        path = tmp_path / "db.bin"
        path.write_bytes(bytes([0x80, 0x01]))
        assert load_database(path, raw_bytes=True) == [1] + [0] * 14 + [1]

    def test_invalid_characters(self, tmp_path: Path) -> None:
        path = tmp_path / "db.txt"
        path.write_text("0102")
        with pytest.raises(ValidationError):
            load_database(path)

    def test_empty(self, tmp_path: Path) -> None:
        path = tmp_path / "db.txt"
        path.write_text(" \n")
        with pytest.raises(ValidationError):
            load_database(path)

    def test_missing(self, tmp_path: Path) -> None:
        with pytest.raises(ValidationError):
            load_database(tmp_path / "nowhere.txt")


class TestWriters:
    def test_atomic_write(self, tmp_path: Path) -> None:
        path = tmp_path / "nested" / "out.json"
        write_text_atomic(path, "first")
        write_text_atomic(path, "second")
        assert path.read_text() == "second"
        assert [p.name for p in path.parent.iterdir()] == ["out.json"]

    def test_json_handles_numpy(self) -> None:
        text = to_json({"b": np.int64(3), "a": np.array([0.5]), "c": np.bool_(True)})
        assert json.loads(text) == {"a": [0.5], "b": 3, "c": True}
        assert text.index('"a"') < text.index('"b"')

    def test_csv(self) -> None:
        assert to_csv([["x", "y"], [1, 2]]) == "x,y\n1,2\n"

    def test_failed_write_leaves_no_temp_file(self, tmp_path: Path) -> None:
        path = tmp_path / "out.json"
        with pytest.raises(TypeError):
            write_text_atomic(path, 123)  # type: ignore[arg-type]
        assert list(tmp_path.iterdir()) == []

    def test_failed_rename_leaves_no_temp_file(
        self, tmp_path: Path, monkeypatch: pytest.MonkeyPatch
    ) -> None:
        def refuse(src: str, dst: Path) -> None:
            raise OSError("read-only target")

        monkeypatch.setattr(os, "replace", refuse)
        with pytest.raises(OSError):
            write_text_atomic(tmp_path / "out.json", "text")
        assert list(tmp_path.iterdir()) == []
