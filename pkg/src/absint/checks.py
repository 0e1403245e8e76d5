"""Verification events and analysis reports.

A check is one verification event: a property kind at a source
location, resolved to safe (the abstract state entailed the property)
or alarm (it did not).  The report aggregates every check the analysis
performed plus its soundness assumptions; selectivity is the fraction
of checks proved safe, the analyzer's baseline-free precision measure.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Optional

from .ast import SourceLoc

TOOL_VERSION = "0.1.0"


class CheckKind(Enum):
    INTEGER_OVERFLOW = "integer-overflow"
    DIVISION_BY_ZERO = "division-by-zero"
    MODULO_BY_ZERO = "modulo-by-zero"
    ASSERT_FAILURE = "assert-failure"


SAFE = "safe"
ALARM = "alarm"


@dataclass(frozen=True)
class CheckRecord:
    kind: CheckKind
    loc: SourceLoc
    status: str  # "safe" | "alarm"
    callstack: tuple[str, ...]  # function names, entry first
    detail: str = ""

    def sort_key(self):
        return (self.loc.file, self.loc.line, self.loc.col, self.kind.value, self.callstack)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "file": self.loc.file,
            "line": self.loc.line,
            "col": self.loc.col,
            "status": self.status,
            "callstack": list(self.callstack),
            "detail": self.detail,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CheckRecord":
        return cls(
            CheckKind(d["kind"]),
            SourceLoc(d["file"], d["line"], d["col"]),
            d["status"],
            tuple(d["callstack"]),
            d.get("detail", ""),
        )


@dataclass
class Report:
    tool_version: str
    program_id: str
    configuration: str
    time_ms: int
    checks: list[CheckRecord]
    assumptions: list[str]
    coverage: Optional[dict] = None
    crash: Optional[dict] = None

    @property
    def selectivity(self) -> Optional[Fraction]:
        """Safe checks over total checks; absent (None) when nothing was
        checked, to avoid flattering empty analyses."""
        if not self.checks:
            return None
        safe = sum(1 for c in self.checks if c.status == SAFE)
        return Fraction(safe, len(self.checks))

    @property
    def alarms(self) -> list[CheckRecord]:
        return [c for c in self.checks if c.status == ALARM]

    def to_dict(self) -> dict:
        sel = self.selectivity
        return {
            "tool_version": self.tool_version,
            "program_id": self.program_id,
            "configuration": self.configuration,
            "time_ms": self.time_ms,
            "checks": [c.to_dict() for c in sorted(self.checks, key=CheckRecord.sort_key)],
            "assumptions": list(self.assumptions),
            "selectivity": None if sel is None else [sel.numerator, sel.denominator],
            "coverage": self.coverage,
            "crash": self.crash,
        }


def selectivity_str(sel: Optional[Fraction]) -> str:
    if sel is None:
        return "n/a"
    return f"{float(sel) * 100:.2f}%"
