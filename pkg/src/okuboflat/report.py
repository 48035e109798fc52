"""Residual reports shared by the verification routines."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple


class ResidualRow(NamedTuple):
    sample: int
    direction: str
    condition: str
    residual: float


def format_float(x: float) -> str:
    """Shortest round-trip representation of a double."""
    return repr(float(x))


@dataclass
class ResidualReport:
    """A flat table of residuals indexed by sample, direction and condition."""

    rows: list = field(default_factory=list)

    def add(self, sample: int, direction: str, condition: str, residual: float) -> None:
        self.rows.append(ResidualRow(int(sample), str(direction), str(condition), float(residual)))

    def extend(self, other: "ResidualReport", sample_offset: int = 0) -> None:
        for r in other.rows:
            self.add(r.sample + sample_offset, r.direction, r.condition, r.residual)

    def conditions(self) -> list:
        seen = []
        for r in self.rows:
            if r.condition not in seen:
                seen.append(r.condition)
        return seen

    def maxima(self) -> dict:
        """Largest residual per condition."""
        out: dict = {}
        for r in self.rows:
            out[r.condition] = max(out.get(r.condition, 0.0), r.residual)
        return out

    def max(self, condition: str | None = None) -> float:
        vals = [r.residual for r in self.rows if condition is None or r.condition == condition]
        return max(vals, default=0.0)

    def failures(self, limits: dict | float) -> list:
        """Rows whose residual exceeds its limit (a scalar or a per-condition mapping)."""
        bad = []
        for r in self.rows:
            lim = limits if isinstance(limits, (int, float)) else limits.get(r.condition)
            if lim is not None and not (r.residual <= lim):
                bad.append(r)
        return bad

    def to_csv(self, columns: Iterable[str] = ("sample", "direction", "condition", "residual")) -> str:
        """Render as CSV.  The column ``check`` is an alias of ``condition``."""
        columns = list(columns)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for r in self.rows:
            rec = {"sample": str(r.sample), "direction": r.direction, "condition": r.condition,
                   "check": r.condition, "residual": format_float(r.residual)}
            w.writerow([rec[c] for c in columns])
        return buf.getvalue()
