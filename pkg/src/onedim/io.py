"""Deterministic JSON and CSV output."""
from __future__ import annotations

import csv
import dataclasses
import json
import math
from enum import Enum
from fractions import Fraction
from pathlib import Path

import numpy as np

DIGITS = 12


def _num(x: float, digits: int):
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if digits <= 0:
        return x
    y = float(f"{x:.{digits}g}")
    return 0.0 if y == 0 else y


def to_jsonable(obj, digits: int = DIGITS):
    """Plain JSON data with floats rounded to ``digits`` significant digits (0 keeps full precision)."""
    if hasattr(obj, "to_json") and not isinstance(obj, type):
        return to_jsonable(obj.to_json(), digits)
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _num(float(obj), digits)
    if isinstance(obj, Fraction):
        return [obj.numerator, obj.denominator]
    if isinstance(obj, str) or obj is None:
        return obj
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v, digits) for k, v in obj.items()}
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v, digits) for v in obj.tolist()]
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = sorted(obj, key=repr) if isinstance(obj, (set, frozenset)) else obj
        return [to_jsonable(v, digits) for v in items]
    if dataclasses.is_dataclass(obj):
        return to_jsonable(dataclasses.asdict(obj), digits)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, digits: int = DIGITS) -> str:
    return json.dumps(to_jsonable(obj, digits), sort_keys=True, indent=2, allow_nan=False)


def load_json(path):
    return json.loads(Path(path).read_text())


def write_csv(path, header, rows, digits: int = DIGITS):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([to_jsonable(v, digits) for v in row])
