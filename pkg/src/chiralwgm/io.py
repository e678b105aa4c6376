"""CSV and JSON artifact writers with deterministic formatting."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

SIGNIFICANT_DIGITS = 12


def format_value(value) -> str:
    """Numbers with 12 significant digits; everything else via ``str``."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return f"{value:.{SIGNIFICANT_DIGITS}g}"
    return str(value)


def write_csv(path, columns, rows) -> Path:
    """Write a header row and ``rows`` (sequences or dicts keyed by column)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            values = [row[c] for c in columns] if isinstance(row, dict) else row
            writer.writerow([format_value(v) for v in values])
    return path


def read_csv(path) -> tuple[list[str], list[list[str]]]:
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, (complex, np.complexfloating)):
        return {"re": _jsonable(float(value.real)), "im": _jsonable(float(value.imag))}
    if isinstance(value, (np.floating, float)):
        value = float(value)
        if math.isfinite(value):
            return float(f"{value:.{SIGNIFICANT_DIGITS}g}")
        return "inf" if value > 0 else ("-inf" if value < 0 else "nan")
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def write_json(path, payload) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_jsonable(payload), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def write_table(path_stem, columns, rows, fmt: str = "csv") -> Path:
    """Write a table as ``<stem>.csv`` or as ``<stem>.json`` (list of records)."""
    stem = Path(path_stem)
    if fmt == "csv":
        return write_csv(stem.with_suffix(".csv"), columns, rows)
    records = [dict(zip(columns, r)) if not isinstance(r, dict) else {c: r[c] for c in columns} for r in rows]
    return write_json(stem.with_suffix(".json"), {"columns": list(columns), "rows": records})
