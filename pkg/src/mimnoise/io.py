"""CSV files with a one-line JSON comment header carrying the run config."""

from __future__ import annotations

import csv
import dataclasses
import json
import math
from pathlib import Path

import numpy as np


def jsonable(obj):
    """Convert dataclasses, numpy values and complex numbers to JSON types."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": jsonable(obj.real), "im": jsonable(obj.imag)}
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        # JSON has no inf/nan; keep them as strings
        return v if math.isfinite(v) else str(v)
    return obj


def dumps(obj) -> str:
    return json.dumps(jsonable(obj), sort_keys=True)


def write_csv(path: str | Path, header: dict, columns: dict) -> Path:
    """Write equal-length columns; floats use 17 significant digits."""
    path = Path(path)
    names = list(columns)
    cols = [np.asarray(columns[k]) for k in names]
    lengths = {c.size for c in cols}
    if len(lengths) > 1:
        raise ValueError("columns have different lengths")
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write("# " + dumps(header) + "\n")
        w = csv.writer(fh)
        w.writerow(names)
        for row in zip(*cols):
            w.writerow([_fmt(v) for v in row])
    return path


def _fmt(v) -> str:
    if isinstance(v, (np.integer, int)):
        return str(int(v))
    return repr(float(v))


def read_csv(path: str | Path) -> tuple[dict, dict]:
    with open(path, newline="") as fh:
        first = fh.readline()
        if not first.startswith("# "):
            raise ValueError("missing JSON header")
        header = json.loads(first[2:])
        rows = list(csv.reader(fh))
    names = rows[0]
    data = np.array(rows[1:], dtype=float).reshape(-1, len(names))
    return header, {n: data[:, k] for k, n in enumerate(names)}


def write_json(path: str | Path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(jsonable(obj), indent=2, sort_keys=True) + "\n")
    return path
