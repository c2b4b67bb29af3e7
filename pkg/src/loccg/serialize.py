"""JSON and CSV emission with fixed real formatting.

Reals go out with 17 significant digits in JSON (enough to round-trip a
double) and 6 in human-readable tables. Rationals stay exact as "p/q".
"""
from __future__ import annotations

import csv
import io
import json
import math
from fractions import Fraction

import numpy as np

from loccg.numerics import format_rational


def fmt_real(x: float, digits: int = 17) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"non-finite real {x}")
    if x == 0:
        x = 0.0  # drop the sign of -0.0
    return f"{x:.{digits}g}"


def _plain(obj):
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def dumps(obj, indent: int | None = 2) -> str:
    """json.dumps, except floats use 17 significant digits and Fractions print as "p/q"."""
    pad = "" if indent is None else "\n"

    def enc(o, depth):
        o = _plain(o)
        inner = "" if indent is None else " " * (indent * (depth + 1))
        outer = "" if indent is None else " " * (indent * depth)
        sep = "," if indent is None else ","
        if isinstance(o, bool) or o is None:
            return json.dumps(o)
        if isinstance(o, Fraction):
            return json.dumps(format_rational(o))
        if isinstance(o, float):
            return fmt_real(o)
        if isinstance(o, (int, str)):
            return json.dumps(o)
        if isinstance(o, dict):
            if not o:
                return "{}"
            items = [f"{inner}{json.dumps(str(k))}: {enc(v, depth + 1)}" for k, v in o.items()]
            return "{" + pad + (sep + pad).join(items) + pad + outer + "}"
        if isinstance(o, (list, tuple)):
            if not o:
                return "[]"
            items = [f"{inner}{enc(v, depth + 1)}" for v in o]
            return "[" + pad + (sep + pad).join(items) + pad + outer + "]"
        raise TypeError(f"cannot serialise {type(o).__name__}")

    return enc(obj, 0)


def _cell(v, digits: int) -> str:
    v = _plain(v)
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, Fraction):
        return format_rational(v)
    if isinstance(v, float):
        return fmt_real(v, digits)
    if v is None:
        return ""
    return str(v)


def to_csv(header: list[str], rows: list[list], digits: int = 17) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(v, digits) for v in row])
    return buf.getvalue()


def to_table(header: list[str], rows: list[list], digits: int = 6) -> str:
    cells = [header] + [[_cell(v, digits) for v in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = ["  ".join(c.rjust(wd) for c, wd in zip(r, widths)) for r in cells]
    return "\n".join(lines) + "\n"
