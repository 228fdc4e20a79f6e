"""Named pass/fail diagnostics shared by every stage."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, List, Optional


@dataclass(frozen=True)
class ReportItem:
    name: str
    value: float
    tolerance: float
    passed: bool
    anchor: str = "plumbing"
    note: str = ""

    def __post_init__(self):
        if not self.anchor:
            raise ValueError("every report item needs an anchor (or the tag 'plumbing')")

    def to_dict(self) -> dict:
        value = self.value if math.isfinite(self.value) else repr(self.value)
        tol = self.tolerance if math.isfinite(self.tolerance) else repr(self.tolerance)
        return {
            "name": self.name,
            "value": value,
            "tolerance": tol,
            "pass": bool(self.passed),
            "anchor": self.anchor,
            "note": self.note,
        }


def upper(name, value, tolerance, anchor="plumbing", note="") -> ReportItem:
    """Item passing when ``value <= tolerance``."""
    value = float(value)
    return ReportItem(name, value, float(tolerance), bool(value <= tolerance), anchor, note)


def lower(name, value, bound, anchor="plumbing", note="") -> ReportItem:
    """Item passing when ``value >= bound``."""
    value = float(value)
    return ReportItem(name, value, float(bound), bool(value >= bound), anchor, note)


def info(name, value, anchor="plumbing", note="") -> ReportItem:
    """Reported quantity that is not checked against anything."""
    return ReportItem(name, float(value), math.inf, True, anchor, note)


@dataclass
class DiagnosticsReport:
    items: List[ReportItem] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)

    @property
    def overall(self) -> bool:
        return all(item.passed for item in self.items)

    def add(self, item: ReportItem) -> ReportItem:
        self.items.append(item)
        return item

    def extend(self, other: "DiagnosticsReport") -> "DiagnosticsReport":
        self.items.extend(other.items)
        self.warnings.extend(w for w in other.warnings if w not in self.warnings)
        return self

    def __getitem__(self, name: str) -> ReportItem:
        for item in self.items:
            if item.name == name:
                return item
        raise KeyError(name)

    def __contains__(self, name: str) -> bool:
        return any(item.name == name for item in self.items)

    def failed(self) -> List[ReportItem]:
        return [item for item in self.items if not item.passed]

    def to_dict(self) -> dict:
        return {
            "overall": self.overall,
            "items": [item.to_dict() for item in self.items],
            "warnings": list(self.warnings),
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    def table(self) -> str:
        rows = [("check", "value", "tolerance", "status")]
        for it in self.items:
            tol = "-" if math.isinf(it.tolerance) else f"{it.tolerance:.3g}"
            status = "info" if math.isinf(it.tolerance) else ("PASS" if it.passed else "FAIL")
            rows.append((it.name, f"{it.value:.6g}", tol, status))
        widths = [max(len(r[i]) for r in rows) for i in range(4)]
        lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)) for r in rows]
        lines.insert(1, "  ".join("-" * w for w in widths))
        lines += [f"warning: {w}" for w in self.warnings]
        lines.append(f"overall: {'PASS' if self.overall else 'FAIL'}")
        return "\n".join(lines)


def merge(reports: Iterable[DiagnosticsReport], warnings: Optional[list] = None) -> DiagnosticsReport:
    out = DiagnosticsReport(warnings=list(warnings or []))
    for rep in reports:
        out.extend(rep)
    return out
