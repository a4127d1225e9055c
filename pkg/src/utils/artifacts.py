"""Atomic writers for run artifacts (CSV tables and JSON reports)."""

import json
import os
import tempfile
from pathlib import Path
from typing import Any

import pandas as pd

FLOAT_FORMAT = "%.17g"


def _atomic_write(path: Path, text: str) -> None:
    # Temp file in the target directory, then rename
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise


def write_csv(df: pd.DataFrame, path: Path) -> Path:
    """Write a table with round-trip float precision."""
    path = Path(path)
    _atomic_write(path, df.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n"))
    return path


def write_json(payload: Any, path: Path) -> Path:
    """Write JSON with sorted keys so identical payloads give identical bytes."""
    path = Path(path)
    _atomic_write(path, json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n")
    return path


class ArtifactWriter:
    """Single writer for one run directory; remembers what it wrote."""

    def __init__(self, out_dir: Path):
        self.out_dir = Path(out_dir)
        self.written: list[str] = []

    def csv(self, name: str, df: pd.DataFrame) -> Path:
        path = write_csv(df, self.out_dir / name)
        self._record(name)
        return path

    def json(self, name: str, payload: Any) -> Path:
        path = write_json(payload, self.out_dir / name)
        self._record(name)
        return path

    def _record(self, name: str) -> None:
        if name not in self.written:
            self.written.append(name)
