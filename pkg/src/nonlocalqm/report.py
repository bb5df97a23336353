"""Deterministic JSON and CSV writers for experiment results."""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


def fmt_float(x: float) -> str:
    """17 significant digits; non-finite values become JSON null."""
    x = float(x)
    if not math.isfinite(x):
        return "null"
    s = format(x, ".17g")
    if "." not in s and "e" not in s and "n" not in s:
        s += ".0"
    return s


def _plain(o):
    if isinstance(o, (np.bool_,)):
        return bool(o)
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.ndarray):
        return [_plain(v) for v in o.tolist()]
    if isinstance(o, complex):
        return {"real": o.real, "imag": o.imag}
    return o


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON with sorted keys and floats printed at fixed precision."""
    obj = _plain(obj)
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return fmt_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {dumps(obj[k], indent, _level + 1)}"
                 for k in sorted(obj, key=str)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


@dataclass
class Check:
    name: str
    value: float
    tolerance: float
    passed: bool
    relation: str = "<="

    def as_dict(self) -> dict:
        return {"name": self.name, "value": self.value, "tolerance": self.tolerance,
                "relation": self.relation, "passed": bool(self.passed)}


def check(name: str, value, tolerance, relation: str = "<=") -> Check:
    v, t = float(value), float(tolerance)
    ok = {"<=": v <= t, ">=": v >= t, "<": v < t, ">": v > t}[relation]
    return Check(name, v, t, bool(ok), relation)


@dataclass
class Table:
    """CSV table; ``columns`` carry units in brackets, e.g. ``'l_P [length]'``."""

    columns: list
    rows: list = field(default_factory=list)

    def add(self, *values):
        self.rows.append(values)


@dataclass
class Result:
    metrics: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    tables: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        s = fmt_float(v)
        return "nan" if s == "null" else s
    return str(v)


def write_table(path: Path, table: Table):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(table.columns)
        for row in table.rows:
            w.writerow([_cell(v) for v in row])


def write_result(outdir: Path, summary: dict, tables: dict):
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "summary.json").write_text(dumps(summary) + "\n", encoding="utf-8")
    for name, table in sorted(tables.items()):
        write_table(outdir / f"{name}.csv", table)
