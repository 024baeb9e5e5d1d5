"""Byte-stable CSV and JSON output.

Floats are written with 17 significant digits, '.' as decimal separator and
'\\n' line endings, so identical inputs always give identical files.
"""

from __future__ import annotations

import json
import math
import os
import sys
from importlib import resources
from typing import Any, Iterable, Sequence

import numpy as np


def format_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"cannot serialise non-finite float {x!r}")
    return format(float(x), ".17g")


def _scalar(value: Any) -> str:
    if value is None:
        return "null"
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format_float(value)
    return json.dumps(str(value), ensure_ascii=False)


def to_json(data: Any, indent: int = 2, _level: int = 0) -> str:
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(data, dict):
        if not data:
            return "{}"
        items = [f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {to_json(v, indent, _level + 1)}" for k, v in data.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(data, (list, tuple, np.ndarray)):
        if len(data) == 0:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in data):
            return "[" + ", ".join(_scalar(v) for v in data) + "]"
        items = [pad + to_json(v, indent, _level + 1) for v in data]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    return _scalar(data)


def to_csv(rows: Iterable[dict], columns: Sequence[str]) -> str:
    lines = [",".join(columns)]
    for row in rows:
        cells = []
        for col in columns:
            v = row.get(col)
            cells.append("" if v is None else _scalar(v).strip('"'))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def load_schema(name: str) -> dict:
    """Shipped JSON schema, e.g. ``load_schema("trace")``."""
    text = resources.files("arcwalk").joinpath("schemas", f"{name}.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


TRACE_COLUMNS = ("tau", "probability")
INVARIANCE_COLUMNS = ("orbit_id", "arc", "tau", "probability")
SWEEP_COLUMNS = (
    "n", "delta", "lambda", "mu", "theta", "t_star", "t_star_lower", "t_star_upper", "p_star",
    "term_beta", "term_mid_bound", "term_tail", "beta_p_a", "beta_p_a_inv", "beta_residual",
)


def flatten_knn_row(report: dict) -> dict:
    row = {k: v for k, v in report.items() if k != "beta_concentration"}
    conc = report["beta_concentration"]
    row.update(beta_p_a=conc["p_a"], beta_p_a_inv=conc["p_a_inv"], beta_residual=conc["residual"])
    return row


def emit_report(text: str, path: str | os.PathLike | None) -> None:
    """Write ``text`` to ``path`` (stdout for ``None`` or ``'-'``)."""
    if path is None or str(path) == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
