"""Load simulation run outputs: a run directory (series.csv + meta.json +
summary.json) or a bundled run.json.

Only schema version "1" is supported; anything else is refused up front so
a stale renderer never silently misreads newer files.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

SUPPORTED_SCHEMA = "1"

TIMESERIES_COLUMNS = ("t_ns", "mean_n", "mean_Jz", "re_mean_a", "im_mean_a", "trace", "tail")
SWEEP_COLUMNS = ("n_atoms", "n_input", "turning_time_ns", "n_absorbed", "ratio")
SCAN_COLUMNS = ("dz_nm", "norm_n_superposition", "norm_n_fully_excited")


class SchemaError(ValueError):
    """Version stamp or column layout does not match the supported schema."""


class DataError(ValueError):
    """Structurally valid files with unusable content (e.g. no rows)."""


@dataclass
class RunData:
    meta: dict
    summary: dict
    columns: tuple
    table: dict  # column name -> float ndarray

    @property
    def scenario(self) -> str:
        return self.meta.get("scenario", "?")

    def column(self, name: str) -> np.ndarray:
        return self.table[name]


def _check_schema(meta: dict, source):
    stamp = meta.get("schema_version")
    if stamp != SUPPORTED_SCHEMA:
        raise SchemaError(
            f"{source}: schema version {stamp!r} is not supported "
            f"(this renderer reads version {SUPPORTED_SCHEMA!r})"
        )


def _parse_csv(text: str, source) -> tuple[tuple, dict]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise DataError(f"{source}: empty table")
    columns = tuple(lines[0].split(","))
    rows = [ln.split(",") for ln in lines[1:]]
    if not rows:
        raise DataError(f"{source}: header only, no data rows")
    if any(len(r) != len(columns) for r in rows):
        raise SchemaError(f"{source}: ragged rows do not match the header")
    table = {
        name: np.array([float(r[i]) for r in rows])
        for i, name in enumerate(columns)
    }
    return columns, table


def load_run(path) -> RunData:
    """Load either a run directory or a single run.json bundle."""
    path = Path(path)
    if path.is_dir():
        meta = json.loads((path / "meta.json").read_text(encoding="utf-8"))
        _check_schema(meta, path / "meta.json")
        summary = json.loads((path / "summary.json").read_text(encoding="utf-8"))
        columns, table = _parse_csv((path / "series.csv").read_text(encoding="utf-8"),
                                    path / "series.csv")
    elif path.suffix == ".json":
        payload = json.loads(path.read_text(encoding="utf-8"))
        meta = payload.get("meta", {})
        _check_schema(meta, path)
        summary = payload.get("summary", {})
        series = payload.get("series", {})
        if not series or not next(iter(series.values()), []):
            raise DataError(f"{path}: empty series payload")
        columns = tuple(meta.get("columns", list(series)))
        table = {name: np.array([float(v) for v in series[name]]) for name in columns}
    else:
        raise DataError(f"{path}: expected a run directory or a run.json bundle")

    expected = meta.get("columns")
    if expected is not None and tuple(expected) != columns:
        raise SchemaError(f"{path}: table columns {columns} disagree with metadata {expected}")
    return RunData(meta=meta, summary=summary, columns=columns, table=table)


def config_rate_khz(meta: dict, key: str) -> float | None:
    """Pull a rate out of the echoed config, in kHz over 2 pi."""
    text = (meta.get("config") or {}).get(key)
    if text is None:
        return None
    m = re.match(r"^2pi\*([-+0-9.eE]+)\s*kHz$", text.strip())
    return float(m.group(1)) if m else None
