"""CSV / JSON report files, written atomically."""
from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile

import numpy as np

FORMATS = ("csv", "json")


def _plain(value):
    """Convert numpy scalars and arrays to built-in types."""
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


def format_float(x):
    """17 significant digits; integral floats keep a trailing '.0'."""
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    text = "%.17g" % x
    if x == int(x) and abs(x) < 1e16 and "e" not in text:
        text += ".0"
    return text


def _cell(value):
    value = _plain(value)
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return format_float(value)
    if isinstance(value, complex):
        return f"{format_float(value.real)}{'+' if value.imag >= 0 else '-'}{format_float(abs(value.imag))}j"
    if isinstance(value, (list, dict)):
        return json.dumps(value, separators=(",", ":"))
    if value is None:
        return ""
    return str(value)


def render(records, fmt="csv", fields=None):
    """Report text for a list of homogeneous dict records."""
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}")
    records = [_plain(dict(r)) for r in records]
    if fields is None:
        fields = list(records[0]) if records else []
    fields = list(fields)
    for r in records:
        if list(r) != fields:
            raise ValueError(f"inhomogeneous record keys {list(r)} (expected {fields})")
    if fmt == "json":
        return json.dumps(records, indent=1) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if fields:
        writer.writerow(fields)
    for r in records:
        writer.writerow([_cell(r[f]) for f in fields])
    return buf.getvalue()


def emit_report(records, fmt, path, fields=None):
    """Write ``records`` as CSV (header + rows) or a JSON array to ``path``.

    ``fields`` fixes the column order and gives the header of an empty report.
    The file is written to a temporary sibling and renamed into place.
    """
    text = render(records, fmt, fields)
    path = os.fspath(path)
    folder = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=folder)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path
