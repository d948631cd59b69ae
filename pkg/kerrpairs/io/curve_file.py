# kerrpairs/io/curve_file.py
"""
Figure-ready curve files.

CSV layout (UTF-8, newline-terminated):

  # key: <JSON value>        one metadata line per key, sorted
  col_a [unit],col_b [unit]  header
  1.0000000000000001e-05,…   rows, every value as %.17g

The JSON variant holds the same content as {"metadata", "columns", "rows"}.
Both parse back through read_curve_file with full double precision.
"""

from __future__ import annotations

import json
import logging
import math
import threading
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Sequence

import numpy as np
from pydantic import BaseModel, Field, model_validator

from kerrpairs.core.errors import InvalidConfig
from kerrpairs.models.schemas import OutputFormat
from kerrpairs.shared import _atomic_write_text, output_dir

logger = logging.getLogger("kerrpairs.io")

_META_PREFIX = "# "


class CurveFile(BaseModel):
    """Named numeric columns plus a metadata block."""

    columns: list[str]
    rows: list[list[float]] = Field(default_factory=list)
    metadata: Dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _rectangular(self) -> "CurveFile":
        if not self.columns:
            raise ValueError("a curve file needs at least one column")
        for name in self.columns:
            if "," in name or "\n" in name:
                raise ValueError(f"column name {name!r} may not contain commas or newlines")
        width = len(self.columns)
        for i, row in enumerate(self.rows):
            if len(row) != width:
                raise ValueError(f"row {i} has {len(row)} values, header has {width}")
        return self

    @classmethod
    def from_arrays(
        cls, columns: Sequence[str], arrays: Sequence[Any], metadata: Dict[str, Any] | None = None,
    ) -> "CurveFile":
        stacked = np.column_stack([np.asarray(a, dtype=float).ravel() for a in arrays])
        return cls(columns=list(columns), rows=stacked.tolist(), metadata=dict(metadata or {}))

    def column(self, name: str) -> np.ndarray:
        index = self.columns.index(name)
        return np.array([row[index] for row in self.rows], dtype=float)


def _json_default(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, BaseModel):
        return value.model_dump(mode="json")
    raise TypeError(f"cannot serialise {type(value).__name__} into curve metadata")


def _format_value(value: float) -> str:
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return format(value, ".17g")


def render_curve(curve: CurveFile, fmt: OutputFormat = OutputFormat.CSV) -> str:
    fmt = OutputFormat(fmt)
    if fmt is OutputFormat.JSON:
        payload = {"metadata": curve.metadata, "columns": curve.columns, "rows": curve.rows}
        return json.dumps(payload, indent=2, sort_keys=True, default=_json_default) + "\n"
    lines = [
        f"{_META_PREFIX}{key}: {json.dumps(curve.metadata[key], sort_keys=True, default=_json_default)}"
        for key in sorted(curve.metadata)
    ]
    lines.append(",".join(curve.columns))
    lines.extend(",".join(_format_value(float(v)) for v in row) for row in curve.rows)
    return "\n".join(lines) + "\n"


def write_curve_file(path: Path, curve: CurveFile, fmt: OutputFormat = OutputFormat.CSV) -> Path:
    """Atomic write; the parent directory is created on demand."""
    path = Path(path)
    _atomic_write_text(path, render_curve(curve, fmt))
    logger.info("wrote %s (%d rows, %d columns)", path, len(curve.rows), len(curve.columns))
    return path


def _parse_csv(text: str, origin: str) -> CurveFile:
    metadata: Dict[str, Any] = {}
    lines = [line for line in text.splitlines() if line.strip()]
    body_start = 0
    for body_start, line in enumerate(lines):
        if not line.startswith("#"):
            break
        key, sep, raw = line[len(_META_PREFIX):].partition(": ")
        if not sep:
            raise InvalidConfig(f"{origin}: malformed metadata line {line!r}")
        metadata[key] = json.loads(raw)
    else:
        raise InvalidConfig(f"{origin}: no header row")
    columns = lines[body_start].split(",")
    rows = [[float(v) for v in line.split(",")] for line in lines[body_start + 1:]]
    return CurveFile(columns=columns, rows=rows, metadata=metadata)


def read_curve_file(path: Path) -> CurveFile:
    """Parse a curve file in either format (detected from the first character)."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if text.lstrip().startswith("{"):
        payload = json.loads(text)
        return CurveFile(columns=payload["columns"], rows=payload["rows"],
                         metadata=payload.get("metadata", {}))
    return _parse_csv(text, str(path))


class CurveFileStore:
    """Serialised writer for one run's output files.

    Adds the code version and, unless reproducible, a UTC timestamp to each
    file's metadata.
    """

    def __init__(
        self,
        base_dir: Path | None = None,
        fmt: OutputFormat = OutputFormat.CSV,
        reproducible: bool = False,
    ):
        self.base = Path(base_dir) if base_dir else output_dir()
        self.format = OutputFormat(fmt)
        self.reproducible = reproducible
        self._write_lock = threading.Lock()
        self.written: list[Path] = []

    def path_for(self, name: str) -> Path:
        return self.base / f"{name}.{self.format.value}"

    def stamp(self, metadata: Dict[str, Any]) -> Dict[str, Any]:
        from kerrpairs import __version__

        stamped = {**metadata, "code_version": __version__}
        if not self.reproducible:
            stamped["created"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
        return stamped

    def write(self, name: str, curve: CurveFile, path: Path | None = None) -> Path:
        target = Path(path) if path else self.path_for(name)
        stamped = curve.model_copy(update={"metadata": self.stamp(curve.metadata)})
        with self._write_lock:
            write_curve_file(target, stamped, self.format)
            self.written.append(target)
        return target
