"""CSV / JSON emitters.

CSV floats use ``repr`` (shortest round-trip), NaN is written as ``nan``;
JSON writes NaN/inf as null.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, np.integer):
        return str(int(v))
    return v


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        return f if math.isfinite(f) else None
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def write_csv(records, path, columns=None):
    records = list(records)
    if columns is None:
        if not records:
            raise ValueError("columns are required for an empty record set")
        columns = list(records[0].keys())
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(columns)
        for rec in records:
            w.writerow([_cell(rec[c]) for c in columns])
    return path


def write_json(obj, path):
    path = Path(path)
    path.write_text(json.dumps(_jsonable(obj), indent=2, allow_nan=False) + "\n")
    return path


def emit(records, fmt, path, columns=None):
    if fmt == "csv":
        return write_csv(records, path, columns)
    if fmt == "json":
        return write_json(records, path)
    raise ValueError(f"unknown output format {fmt!r}")


def read_csv(path):
    """Parse a file written by ``write_csv``; numeric cells become floats."""
    with Path(path).open(newline="") as fh:
        rows = list(csv.DictReader(fh))
    out = []
    for row in rows:
        parsed = {}
        for k, v in row.items():
            try:
                parsed[k] = float(v)
            except ValueError:
                parsed[k] = v
        out.append(parsed)
    return out
