"""absint: a transparent abstract-interpretation analyzer for MiniImp.

The package bundles the analyzer itself (parser, numeric domains,
fixpoint engine with safe-check/alarm reporting and selectivity) with
the maintenance machinery built around it: report diffing and a CI
regression gate, analysis-observing hooks (coverage, profiling,
unsoundness/imprecision detection, tracing, threshold collection), an
interactive abstract debugger with a JSON wire protocol, and automated
testcase reduction with crash and differential-configuration oracles.
"""

from .checks import CheckKind, CheckRecord, Report, TOOL_VERSION
from .parser import parse, parse_file, ProgramError
from .lexer import ParseError
from .engine import Configuration, analyze, load_config

__all__ = [
    "CheckKind",
    "CheckRecord",
    "Configuration",
    "ParseError",
    "ProgramError",
    "Report",
    "TOOL_VERSION",
    "analyze",
    "load_config",
    "parse",
    "parse_file",
]

__version__ = TOOL_VERSION
