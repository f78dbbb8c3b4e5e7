"""Deterministic CSV and JSON writers."""

import json
import math

import numpy as np

__all__ = ["FLOAT_FMT", "write_csv", "write_json", "to_jsonable"]

FLOAT_FMT = "%.17g"


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return FLOAT_FMT % float(v)


def write_csv(path, header, rows):
    """Write rows (iterables or a 2-D array) with floats at 17 significant digits."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        if isinstance(rows, np.ndarray) and rows.dtype.kind == "f":
            np.savetxt(fh, rows, fmt=FLOAT_FMT, delimiter=",")
            return
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def to_jsonable(obj):
    """Recursively convert numpy scalars and arrays; non-finite floats become None."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def write_json(path, obj):
    """Sorted-key JSON; floats use the shortest exactly round-tripping repr."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(to_jsonable(obj), fh, indent=2, sort_keys=True, allow_nan=False)
        fh.write("\n")
