"""Bound reports: exact quantity vs. bound shape vs. fitted constant.

Every inequality this package checks is normalized to one of two senses:

* ``upper``: lhs <= C * shape at each grid point; the report fits
  C = max(lhs / shape) and passes iff the fit stays within the budget.
* ``lower``: the fitted value is a minimum over the grid (used for
  lower-bound constants such as the smallest right tail below the mean);
  the report passes iff the fit stays >= the budget.

Reports with ``budget=None`` are fit-only: they record the extremal
constant without asserting anything.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, IO, Iterable, Mapping, Sequence

NEG = float("-inf")
POS = float("inf")


def _jsonable(value):
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, float) and (math.isinf(value) or math.isnan(value)):
        return repr(value)
    return value


def _cell(value) -> str:
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, float):
        return repr(value)
    return str(value)


@dataclass
class BoundReport:
    """Per-inequality record of grid points, fitted constant, and verdict."""

    inequality: str
    rows: list[dict[str, Any]]
    fitted_constant: float
    worst_point: dict[str, Any] | None = None
    budget: float | None = None
    sense: str = "upper"
    excluded: int = 0
    slack: float = 0.0
    notes: str = ""

    @property
    def passed(self) -> bool:
        if self.budget is None:
            return math.isfinite(self.fitted_constant) or not self.rows
        if self.sense == "lower":
            return self.fitted_constant >= self.budget - self.slack
        return self.fitted_constant <= self.budget + self.slack

    @classmethod
    def fit(
        cls,
        inequality: str,
        rows: Sequence[Mapping[str, Any]],
        *,
        lhs_key: str = "lhs",
        shape_key: str = "rhs_shape",
        budget: float | None = None,
        sense: str = "upper",
        excluded: int = 0,
        slack: float = 0.0,
        notes: str = "",
    ) -> "BoundReport":
        """Build a report by fitting the extremal lhs/shape ratio over rows."""
        fitted = NEG if sense == "upper" else POS
        worst = None
        out_rows = []
        for row in rows:
            row = dict(row)
            lhs = float(row[lhs_key])
            shape = float(row[shape_key])
            if shape > 0.0:
                ratio = lhs / shape
            else:
                ratio = 0.0 if lhs == 0.0 else math.inf
            row.setdefault("ratio", ratio)
            out_rows.append(row)
            better = ratio > fitted if sense == "upper" else ratio < fitted
            if better:
                fitted = ratio
                worst = row
        if worst is None:
            fitted = 0.0
        return cls(
            inequality=inequality,
            rows=out_rows,
            fitted_constant=fitted,
            worst_point=worst,
            budget=budget,
            sense=sense,
            excluded=excluded,
            slack=slack,
            notes=notes,
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "inequality": self.inequality,
            "sense": self.sense,
            "fitted_constant": _jsonable(self.fitted_constant),
            "budget": _jsonable(self.budget) if self.budget is not None else None,
            "passed": self.passed,
            "excluded": self.excluded,
            "slack": self.slack,
            "notes": self.notes,
            "worst_point": {k: _jsonable(v) for k, v in self.worst_point.items()}
            if self.worst_point
            else None,
            "rows": [{k: _jsonable(v) for k, v in row.items()} for row in self.rows],
        }


@dataclass
class ReportSet:
    """An ordered bundle of reports sharing one verification run."""

    reports: list[BoundReport] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports)

    def summary(self) -> str:
        parts = []
        for r in self.reports:
            verdict = "pass" if r.passed else "FAIL"
            parts.append(f"{r.inequality}: fitted={r.fitted_constant:.6g} [{verdict}]")
        return "; ".join(parts)


def reports_to_json(reports: Iterable[BoundReport]) -> str:
    payload = [r.to_dict() for r in reports]
    return json.dumps(payload, indent=2, sort_keys=True)


def write_reports_csv(reports: Iterable[BoundReport], stream: IO[str]) -> None:
    """One row per grid point, RFC-4180 quoting, inequality id in the first column."""
    reports = list(reports)
    columns: list[str] = ["inequality"]
    for report in reports:
        for row in report.rows:
            for key in row:
                if key not in columns:
                    columns.append(key)
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(columns)
    for report in reports:
        for row in report.rows:
            writer.writerow(
                [report.inequality] + [_cell(row[k]) if k in row else "" for k in columns[1:]]
            )


def write_table_csv(rows: Sequence[Mapping[str, Any]], columns: Sequence[str], stream: IO[str]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row[c]) if c in row and row[c] is not None else "" for c in columns])
