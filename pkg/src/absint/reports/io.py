"""Report persistence: JSON files with a fixed schema.

The on-disk layout mirrors Report.to_dict exactly (fixed key order,
checks pre-sorted), so two analyses of the same program differ only in
time_ms.  Reading validates the schema and rejects unknown versions
with a message naming the first problem found.
"""

from __future__ import annotations

import json
from fractions import Fraction

from ..checks import ALARM, SAFE, CheckKind, CheckRecord, Report


class ReportIOError(Exception):
    pass


_REQUIRED = (
    "tool_version",
    "program_id",
    "configuration",
    "time_ms",
    "checks",
    "assumptions",
    "selectivity",
    "coverage",
    "crash",
)

_CHECK_KEYS = {"kind", "file", "line", "col", "status", "callstack", "detail"}


def write_report(report: Report, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, indent=2, ensure_ascii=False)
        fh.write("\n")


def report_from_dict(raw: dict, source: str = "<dict>") -> Report:
    if not isinstance(raw, dict):
        raise ReportIOError(f"{source}: report must be a JSON object")
    for key in _REQUIRED:
        if key not in raw:
            raise ReportIOError(f"{source}: missing required key {key!r}")
    version = raw["tool_version"]
    if not isinstance(version, str) or not version.startswith("0."):
        raise ReportIOError(f"{source}: unsupported report version {version!r}")
    if not isinstance(raw["checks"], list):
        raise ReportIOError(f"{source}: 'checks' must be a list")
    checks = []
    for i, c in enumerate(raw["checks"]):
        where = f"{source}: checks[{i}]"
        if not isinstance(c, dict) or not _CHECK_KEYS.issubset(c):
            missing = _CHECK_KEYS - set(c) if isinstance(c, dict) else _CHECK_KEYS
            raise ReportIOError(f"{where}: missing {sorted(missing)}")
        try:
            kind = CheckKind(c["kind"])
        except ValueError:
            raise ReportIOError(f"{where}: unknown check kind {c['kind']!r}") from None
        if c["status"] not in (SAFE, ALARM):
            raise ReportIOError(f"{where}: unknown status {c['status']!r}")
        checks.append(CheckRecord.from_dict(c))
    sel = raw["selectivity"]
    if sel is not None:
        if not (isinstance(sel, list) and len(sel) == 2 and all(isinstance(x, int) for x in sel)):
            raise ReportIOError(f"{source}: selectivity must be null or [num, den]")
        declared = Fraction(sel[0], sel[1])
    report = Report(
        tool_version=version,
        program_id=raw["program_id"],
        configuration=raw["configuration"],
        time_ms=raw["time_ms"],
        checks=checks,
        assumptions=list(raw["assumptions"]),
        coverage=raw["coverage"],
        crash=raw["crash"],
    )
    actual = report.selectivity
    if sel is None:
        if actual is not None:
            raise ReportIOError(f"{source}: selectivity null but checks present")
    elif actual != declared:
        raise ReportIOError(
            f"{source}: selectivity {declared} does not match checks ({actual})"
        )
    return report


def read_report(path: str) -> Report:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ReportIOError(f"cannot read report {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ReportIOError(f"{path}: malformed JSON: {exc}") from exc
    return report_from_dict(raw, path)
