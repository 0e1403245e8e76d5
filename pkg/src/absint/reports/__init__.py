from .io import ReportIOError, read_report, write_report
from .diff import BenchDiff, CheckKey, ReportDiff, diff_benchmarks, diff_reports
from .gate import GateResult, ci_gate

__all__ = [
    "BenchDiff",
    "CheckKey",
    "GateResult",
    "ReportDiff",
    "ReportIOError",
    "ci_gate",
    "diff_benchmarks",
    "diff_reports",
    "read_report",
    "write_report",
]
