"""Report diffing: one program pair, or two benchmark directories.

Check identity defaults to (file, line, col, kind); callstacks churn
whenever inlining decisions change, so they only participate when
explicitly requested.  When several records share a key (one per
callstack), the collapsed status is the worst one: a key counts as an
alarm if any context alarms.

The text rendering mirrors a diff: "-" lines are alarms the second
report removed, "+" lines are alarms it added, followed by totals.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Optional

from ..checks import ALARM, SAFE, CheckRecord, Report, selectivity_str
from .io import read_report

# (file, line, col, kind) or (file, line, col, kind, callstack)
CheckKey = tuple


def check_key(record: CheckRecord, by_callstack: bool) -> CheckKey:
    base = (record.loc.file, record.loc.line, record.loc.col, record.kind.value)
    return base + (record.callstack,) if by_callstack else base


def collapse(report: Report, by_callstack: bool) -> dict[CheckKey, str]:
    out: dict[CheckKey, str] = {}
    for record in report.checks:
        key = check_key(record, by_callstack)
        if out.get(key) != ALARM:
            out[key] = record.status
    return out


def _fmt_key(key: CheckKey) -> str:
    file, line, col, kind = key[:4]
    text = f"{kind} {file}:{line}:{col}"
    if len(key) == 5:
        text += f" [{' > '.join(key[4])}]"
    return text


@dataclass
class ReportDiff:
    removed_alarms: list[CheckKey] = field(default_factory=list)
    added_alarms: list[CheckKey] = field(default_factory=list)
    removed_safe: list[CheckKey] = field(default_factory=list)
    added_safe: list[CheckKey] = field(default_factory=list)
    removed_assumptions: list[str] = field(default_factory=list)
    added_assumptions: list[str] = field(default_factory=list)
    time_delta_ms: int = 0
    crash_transition: Optional[str] = None  # "none->crash" | "crash->none"
    selectivity_a: Optional[object] = None
    selectivity_b: Optional[object] = None
    warnings: list[str] = field(default_factory=list)

    @property
    def empty(self) -> bool:
        return not (
            self.removed_alarms
            or self.added_alarms
            or self.removed_safe
            or self.added_safe
            or self.removed_assumptions
            or self.added_assumptions
            or self.crash_transition
        )

    def render(self) -> list[str]:
        lines: list[str] = []
        for key in self.removed_alarms:
            lines.append(f"- alarm {_fmt_key(key)}")
        for key in self.added_alarms:
            lines.append(f"+ alarm {_fmt_key(key)}")
        for key in self.removed_safe:
            lines.append(f"- safe  {_fmt_key(key)}")
        for key in self.added_safe:
            lines.append(f"+ safe  {_fmt_key(key)}")
        for text in self.removed_assumptions:
            lines.append(f"- assumption {text}")
        for text in self.added_assumptions:
            lines.append(f"+ assumption {text}")
        if self.crash_transition:
            lines.append(f"crash: {self.crash_transition}")
        lines.append(
            f"alarms: -{len(self.removed_alarms)} +{len(self.added_alarms)}  "
            f"safe: -{len(self.removed_safe)} +{len(self.added_safe)}"
        )
        lines.append(
            f"selectivity: {selectivity_str(self.selectivity_a)} -> "
            f"{selectivity_str(self.selectivity_b)}"
        )
        lines.append(f"time: {self.time_delta_ms:+d} ms")
        return lines


def diff_reports(a: Report, b: Report, by_callstack: bool = False) -> ReportDiff:
    diff = ReportDiff()
    if a.program_id != b.program_id:
        diff.warnings.append(
            f"comparing different programs: {a.program_id!r} vs {b.program_id!r}"
        )
    ka = collapse(a, by_callstack)
    kb = collapse(b, by_callstack)
    alarms_a = {k for k, s in ka.items() if s == ALARM}
    alarms_b = {k for k, s in kb.items() if s == ALARM}
    safe_a = {k for k, s in ka.items() if s == SAFE}
    safe_b = {k for k, s in kb.items() if s == SAFE}
    diff.removed_alarms = sorted(alarms_a - alarms_b)
    diff.added_alarms = sorted(alarms_b - alarms_a)
    diff.removed_safe = sorted(safe_a - safe_b)
    diff.added_safe = sorted(safe_b - safe_a)
    diff.removed_assumptions = sorted(set(a.assumptions) - set(b.assumptions))
    diff.added_assumptions = sorted(set(b.assumptions) - set(a.assumptions))
    diff.time_delta_ms = b.time_ms - a.time_ms
    if a.crash is None and b.crash is not None:
        diff.crash_transition = "none->crash"
    elif a.crash is not None and b.crash is None:
        diff.crash_transition = "crash->none"
    diff.selectivity_a = a.selectivity
    diff.selectivity_b = b.selectivity
    return diff


@dataclass
class BenchDiff:
    rows: dict[str, ReportDiff] = field(default_factory=dict)
    only_in_a: list[str] = field(default_factory=list)
    only_in_b: list[str] = field(default_factory=list)
    crashes_a: int = 0
    crashes_b: int = 0

    @property
    def total_removed_alarms(self) -> int:
        return sum(len(d.removed_alarms) for d in self.rows.values())

    @property
    def total_added_alarms(self) -> int:
        return sum(len(d.added_alarms) for d in self.rows.values())

    @property
    def total_time_delta_ms(self) -> int:
        return sum(d.time_delta_ms for d in self.rows.values())

    @property
    def empty(self) -> bool:
        return (
            all(d.empty for d in self.rows.values())
            and not self.only_in_a
            and not self.only_in_b
        )

    def render(self) -> list[str]:
        lines: list[str] = []
        for name in sorted(self.rows):
            diff = self.rows[name]
            if diff.empty:
                continue
            lines.append(f"== {name}")
            lines.extend("  " + line for line in diff.render())
        for name in self.only_in_a:
            lines.append(f"only in A: {name}")
        for name in self.only_in_b:
            lines.append(f"only in B: {name}")
        lines.append(
            f"totals: alarms -{self.total_removed_alarms} "
            f"+{self.total_added_alarms}, time {self.total_time_delta_ms:+d} ms, "
            f"crashes {self.crashes_a} -> {self.crashes_b}"
        )
        return lines


def _report_files(directory: str) -> dict[str, str]:
    out = {}
    for name in sorted(os.listdir(directory)):
        if name.endswith(".json"):
            out[name] = os.path.join(directory, name)
    return out


def diff_benchmarks(dir_a: str, dir_b: str, by_callstack: bool = False) -> BenchDiff:
    files_a = _report_files(dir_a)
    files_b = _report_files(dir_b)
    bench = BenchDiff()
    bench.only_in_a = sorted(set(files_a) - set(files_b))
    bench.only_in_b = sorted(set(files_b) - set(files_a))
    for name in sorted(set(files_a) & set(files_b)):
        a = read_report(files_a[name])
        b = read_report(files_b[name])
        bench.rows[name] = diff_reports(a, b, by_callstack)
        bench.crashes_a += 1 if a.crash else 0
        bench.crashes_b += 1 if b.crash else 0
    for name in bench.only_in_a:
        if read_report(files_a[name]).crash:
            bench.crashes_a += 1
    for name in bench.only_in_b:
        if read_report(files_b[name]).crash:
            bench.crashes_b += 1
    return bench
