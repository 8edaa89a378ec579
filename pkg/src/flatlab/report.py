"""Serializable verification reports."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

from . import __version__

CSV_COLUMNS = ("q", "p", "ell", "d", "quantity", "value", "expected", "pass")


def _jsonable(obj: Any):
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if hasattr(obj, "to_json"):
        return obj.to_json()
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


@dataclass
class Check:
    name: str
    measured: Any
    expected: Any
    passed: bool
    params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            **self.params,
            "measured": self.measured,
            "expected": self.expected,
            "pass": bool(self.passed),
        }


@dataclass
class Report:
    command: str
    config: dict = field(default_factory=dict)
    checks: list[Check] = field(default_factory=list)
    data: dict = field(default_factory=dict)
    wall_time: float | None = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, measured, expected, passed: bool, **params) -> Check:
        chk = Check(name, measured, expected, bool(passed), params)
        self.checks.append(chk)
        return chk

    def extend(self, other: Report, prefix: str = "") -> None:
        for c in other.checks:
            self.checks.append(Check(prefix + c.name, c.measured, c.expected, c.passed, c.params))

    def to_dict(self, include_timing: bool = False) -> dict:
        out = {
            "command": self.command,
            "version": __version__,
            "config": self.config,
            **self.data,
            "checks": [c.to_dict() for c in self.checks],
            "pass": self.passed,
        }
        if include_timing:
            out["wall_time"] = self.wall_time
        return out

    def to_json(self, include_timing: bool = False) -> str:
        return json.dumps(self.to_dict(include_timing), default=_jsonable, indent=2, sort_keys=True)

    def csv_rows(self) -> list[dict]:
        rows = []
        for c in self.checks:
            row = {col: c.params.get(col, self.config.get(col, "")) for col in CSV_COLUMNS}
            row.update(quantity=c.name, value=_csv_cell(c.measured),
                       expected=_csv_cell(c.expected), **{"pass": c.passed})
            rows.append(row)
        return rows

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        w.writeheader()
        for row in self.csv_rows():
            w.writerow(row)
        return buf.getvalue()

    def summary(self) -> str:
        lines = [f"{self.command}: {'PASS' if self.passed else 'FAIL'} "
                 f"({sum(c.passed for c in self.checks)}/{len(self.checks)} checks)"]
        for c in self.checks:
            if not c.passed:
                lines.append(f"  FAIL {c.name}: measured={c.measured!s} expected={c.expected!s}")
        if self.wall_time is not None:
            lines.append(f"  wall time {self.wall_time:.2f}s")
        return "\n".join(lines)


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, tuple, dict)):
        return json.dumps(v, default=_jsonable, sort_keys=True)
    return str(v)
