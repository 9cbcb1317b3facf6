"""JSON and CSV encoding with a fixed number format.

Reals are written with 17 significant digits so that identical runs give
byte-identical files.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, is_dataclass
from fractions import Fraction

from .arith import QLaurent, format_rational

__all__ = ["format_real", "value_to_json", "to_jsonable", "dumps", "csv_text"]


def format_real(x: float) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def value_to_json(v):
    """One ring value: Laurent terms, a "num/den" string, or a fixed-format real."""
    if isinstance(v, QLaurent):
        return v.to_json()
    if isinstance(v, bool):
        return v
    if isinstance(v, int):
        return v
    if isinstance(v, Fraction):
        return format_rational(v)
    if isinstance(v, float):
        return _Real(v)
    return v


class _Real(float):
    """Marker so the encoder prints floats with 17 digits."""


def to_jsonable(obj):
    if is_dataclass(obj) and not isinstance(obj, type):
        if hasattr(obj, "to_json"):
            return to_jsonable(obj.to_json())
        return to_jsonable(asdict(obj))
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if hasattr(obj, "to_json") and not isinstance(obj, QLaurent):
        return to_jsonable(obj.to_json())
    return value_to_json(obj)


def _render(obj) -> str:
    # json.dumps would print floats with repr; walk the tree ourselves instead
    if isinstance(obj, dict):
        return "{" + ", ".join(json.dumps(k) + ": " + _render(v) for k, v in obj.items()) + "}"
    if isinstance(obj, list):
        return "[" + ", ".join(_render(v) for v in obj) + "]"
    if isinstance(obj, float) and not isinstance(obj, bool):
        text = format_real(obj)
        return text if math.isfinite(obj) else json.dumps(text)
    return json.dumps(obj)


def dumps(obj) -> str:
    return _render(to_jsonable(obj)) + "\n"


def csv_text(header: list, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _cell(v) -> str:
    if isinstance(v, float):
        return format_real(v)
    if isinstance(v, Fraction):
        return format_rational(v)
    if isinstance(v, QLaurent):
        return str(v)
    return str(v)
