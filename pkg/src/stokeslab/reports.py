"""Report serialization: deterministic JSON and CSV emission.

Floats are printed with 17 significant digits so emitted numbers round-trip
bit-faithfully.
"""

from __future__ import annotations

import csv
import math
import sys


def format_float(v):
    if v != v:  # NaN
        return "null"
    if math.isinf(v):
        return "null"
    return format(v, ".17g")


def to_json_text(obj):
    """Deterministic JSON with 17-significant-digit floats, insertion order."""
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return format_float(obj)
    if isinstance(obj, str):
        out = ['"']
        for ch in obj:
            if ch == '"':
                out.append('\\"')
            elif ch == "\\":
                out.append("\\\\")
            elif ch == "\n":
                out.append("\\n")
            elif ch == "\t":
                out.append("\\t")
            elif ord(ch) < 0x20:
                out.append(f"\\u{ord(ch):04x}")
            else:
                out.append(ch)
        out.append('"')
        return "".join(out)
    if isinstance(obj, dict):
        items = ", ".join(f"{to_json_text(str(k))}: {to_json_text(v)}"
                          for k, v in obj.items())
        return "{" + items + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(to_json_text(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def emit_report(result, format="json", path=None):
    """Write a report payload (dict or object with to_payload) as JSON or CSV."""
    payload = result.to_payload() if hasattr(result, "to_payload") else result
    if format == "json":
        text = to_json_text(payload) + "\n"
        if path is None:
            sys.stdout.write(text)
        else:
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(text)
        return
    if format == "csv":
        if hasattr(result, "to_csv_rows"):
            header, rows = result.to_csv_rows()
        else:
            header = list(payload)
            rows = [[payload[k] for k in header]]
        out = open(path, "w", newline="", encoding="utf-8") if path else sys.stdout
        try:
            writer = csv.writer(out)
            writer.writerow(header)
            for row in rows:
                writer.writerow([format_float(v) if isinstance(v, float) else v
                                 for v in row])
        finally:
            if path:
                out.close()
        return
    raise ValueError(f"unknown report format {format!r}")
