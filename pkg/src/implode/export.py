"""Text serialization with 17 significant digits and a locale-free '.' decimal."""

from __future__ import annotations

import csv
import io
import json
import math

import numpy as np

__all__ = ["fmt", "dumps_json", "write_table", "read_table", "PROFILE_COLUMNS"]

PROFILE_COLUMNS = ("Z", "v", "rho_hat", "u0_hat", "u_hat")


def fmt(x) -> str:
    """17 significant digits, enough to round-trip any binary64 value."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def _plain(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, tuple):
        return list(obj)
    return obj


def dumps_json(obj, indent: int | None = 2, _level: int = 0) -> str:
    """json.dumps, except floats carry 17 digits and non-finite values become strings."""
    obj = _plain(obj)
    pad = "" if indent is None else "\n" + " " * (indent * (_level + 1))
    end = "" if indent is None else "\n" + " " * (indent * _level)
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return json.dumps(obj)
    if isinstance(obj, float):
        s = fmt(obj)
        return s if math.isfinite(obj) else json.dumps(s)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [pad + json.dumps(str(k)) + ": " + dumps_json(v, indent, _level + 1) for k, v in obj.items()]
        return "{" + ",".join(items) + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        items = [pad + dumps_json(v, indent, _level + 1) for v in obj]
        return "[" + ",".join(items) + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def write_table(columns, rows, header: dict | None = None) -> str:
    """CSV text; an optional JSON header is written as '# '-prefixed comment lines."""
    buf = io.StringIO()
    if header is not None:
        for line in dumps_json(header).splitlines():
            buf.write("# " + line + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(x) if isinstance(x, (float, np.floating)) else x for x in row])
    return buf.getvalue()


def read_table(text: str):
    """Inverse of write_table: (header dict or None, column names, list of row lists)."""
    lines = text.splitlines()
    head = [ln[2:] for ln in lines if ln.startswith("# ")]
    body = [ln for ln in lines if not ln.startswith("#")]
    header = json.loads("\n".join(head)) if head else None
    reader = csv.reader(body)
    cols = next(reader)
    rows = []
    for rec in reader:
        rows.append([_parse(x) for x in rec])
    return header, cols, rows


def _parse(s):
    try:
        return float(s)
    except ValueError:
        return s
