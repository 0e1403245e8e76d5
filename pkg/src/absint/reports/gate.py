"""CI regression gate: compare current reports against a baseline.

The gate fails (exit 1) on anything that weakens the analysis: a new
alarm, a lost safe check, a new soundness assumption, a selectivity
drop beyond the tolerance (default 0: any drop fails), or a report that
went missing or newly crashed.  A current-run internal error is its own
failure class (exit 2).  Removed alarms and gained safe checks pass,
reported as improvements; time changes are reported but never gate.
"""

from __future__ import annotations

import os
import shutil
from dataclasses import dataclass, field

from ..checks import selectivity_str
from .diff import _report_files, diff_reports
from .io import read_report

PASS = 0
FAIL = 1
CURRENT_ERROR = 2
USAGE = 3


@dataclass
class GateResult:
    status: int
    lines: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.status == PASS


def ci_gate(
    baseline_dir: str,
    current_dir: str,
    tolerance: float = 0.0,
    update_baseline: bool = False,
) -> GateResult:
    if not os.path.isdir(baseline_dir) or not _report_files(baseline_dir):
        return GateResult(
            USAGE,
            [
                f"no baseline reports in {baseline_dir!r}; "
                "create one by copying a known-good current run "
                "(e.g. run the analyses and pass --update-baseline)"
            ],
        )
    baseline = _report_files(baseline_dir)
    current = _report_files(current_dir) if os.path.isdir(current_dir) else {}
    failures: list[str] = []
    improvements: list[str] = []
    notes: list[str] = []
    current_error = False

    for name in sorted(set(baseline) - set(current)):
        failures.append(f"{name}: report missing from current run (new crash?)")
    for name in sorted(set(current) - set(baseline)):
        notes.append(f"{name}: new program, not in baseline")

    for name in sorted(set(baseline) & set(current)):
        base = read_report(baseline[name])
        cur = read_report(current[name])
        if cur.crash is not None and base.crash is None:
            failures.append(f"{name}: current run crashed: {cur.crash.get('message')}")
            current_error = True
            continue
        diff = diff_reports(base, cur)
        for key in diff.added_alarms:
            failures.append(f"{name}: new alarm: {_key_str(key)}")
        for key in diff.removed_safe:
            failures.append(f"{name}: lost safe check: {_key_str(key)}")
        for text in diff.added_assumptions:
            failures.append(f"{name}: new assumption: {text}")
        if (
            base.selectivity is not None
            and cur.selectivity is not None
            and float(base.selectivity - cur.selectivity) > tolerance
        ):
            failures.append(
                f"{name}: selectivity dropped "
                f"{selectivity_str(base.selectivity)} -> {selectivity_str(cur.selectivity)}"
            )
        for key in diff.removed_alarms:
            improvements.append(f"{name}: improvement: removed alarm {_key_str(key)}")
        for key in diff.added_safe:
            improvements.append(f"{name}: improvement: new safe check {_key_str(key)}")
        if diff.time_delta_ms:
            notes.append(f"{name}: time {diff.time_delta_ms:+d} ms (not gating)")

    lines: list[str] = []
    lines.extend(failures)
    lines.extend(improvements)
    lines.extend(notes)
    if current_error:
        lines.append("GATE: FAIL (current-run internal error)")
        return GateResult(CURRENT_ERROR, lines)
    if failures:
        lines.append(f"GATE: FAIL ({len(failures)} regression(s))")
        return GateResult(FAIL, lines)
    if update_baseline:
        os.makedirs(baseline_dir, exist_ok=True)
        for name, path in current.items():
            shutil.copyfile(path, os.path.join(baseline_dir, name))
        lines.append(f"baseline updated from {current_dir}")
    lines.append(
        "GATE: PASS"
        + (f" ({len(improvements)} improvement(s))" if improvements else "")
    )
    return GateResult(PASS, lines)


def _key_str(key) -> str:
    file, line, col, kind = key[:4]
    return f"{kind} {file}:{line}:{col}"
