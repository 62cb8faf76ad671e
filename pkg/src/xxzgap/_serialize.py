"""Deterministic JSON/CSV rendering.

Floats are always written with 17 significant digits ('%.17g'), which
round-trips IEEE double exactly and keeps repeated runs byte-identical.
Non-finite floats become the strings "inf", "-inf", "nan" (strict JSON has
no spelling for them).  Dict insertion order is preserved.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction

import numpy as np

__all__ = ["format_float", "render_json", "render_csv"]


def format_float(x: float) -> str:
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return "%.17g" % x


def _render(value, out: list[str], indent: int) -> None:
    pad = "  " * indent
    if value is None or isinstance(value, bool):
        out.append("null" if value is None else ("true" if value else "false"))
    elif isinstance(value, (np.integer, int)):
        out.append(str(int(value)))
    elif isinstance(value, (np.floating, float)):
        x = float(value)
        if math.isfinite(x):
            out.append(format_float(x))
        else:
            out.append(json.dumps(format_float(x)))
    elif isinstance(value, Fraction):
        out.append(json.dumps(str(value)))
    elif isinstance(value, str):
        out.append(json.dumps(value))
    elif isinstance(value, np.ndarray):
        _render(value.tolist(), out, indent)
    elif isinstance(value, dict):
        if not value:
            out.append("{}")
            return
        out.append("{\n")
        items = list(value.items())
        for i, (key, item) in enumerate(items):
            out.append(pad + "  " + json.dumps(str(key)) + ": ")
            _render(item, out, indent + 1)
            out.append(",\n" if i < len(items) - 1 else "\n")
        out.append(pad + "}")
    elif isinstance(value, (list, tuple)):
        seq = list(value)
        if not seq:
            out.append("[]")
            return
        if all(isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, bool)
               for v in seq):
            parts = []
            for v in seq:
                sub: list[str] = []
                _render(v, sub, 0)
                parts.append("".join(sub))
            out.append("[" + ", ".join(parts) + "]")
            return
        out.append("[\n")
        for i, item in enumerate(seq):
            out.append(pad + "  ")
            _render(item, out, indent + 1)
            out.append(",\n" if i < len(seq) - 1 else "\n")
        out.append(pad + "]")
    else:
        raise TypeError(f"cannot serialize {type(value).__name__}: {value!r}")


def render_json(payload) -> str:
    out: list[str] = []
    _render(payload, out, 0)
    out.append("\n")
    return "".join(out)


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (np.integer, int)):
        return str(int(value))
    if isinstance(value, (np.floating, float)):
        return format_float(float(value))
    if isinstance(value, Fraction):
        return str(value)
    return str(value)


def render_csv(rows: list[dict], fieldnames: list[str]) -> str:
    """Minimal-quoting CSV with '\\n' line endings; missing keys are empty."""
    lines = [",".join(fieldnames)]
    for row in rows:
        cells = []
        for name in fieldnames:
            cell = _csv_cell(row.get(name))
            if any(ch in cell for ch in ',"\n'):
                cell = '"' + cell.replace('"', '""') + '"'
            cells.append(cell)
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"
