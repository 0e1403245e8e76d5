"""Interestingness oracles for reduction runs.

Three flavors: an arbitrary external command (exit 0 = interesting), an
analyzer-crash matcher (same internal error, by exit code and stderr
pattern), and a differential-configuration oracle (two configurations
disagree on a check's verdict, the standard way to corner an unsound
domain).  One-sided crashes are uninteresting to the differential
oracle; crash hunting belongs to the crash oracle.
"""

from __future__ import annotations

import os
import re
import subprocess
import sys
import tempfile
from dataclasses import dataclass, field
from typing import Callable, Optional

from ..engine import AnalysisOptions, Analyzer, build_domain, load_config
from ..lexer import ParseError
from ..parser import ProgramError, parse
from ..checks import ALARM, SAFE

DEFAULT_TIMEOUT_S = 30.0


@dataclass
class Oracle:
    """Interestingness predicate over candidate source text, with an
    invocation counter; deterministic within one reduction run."""

    label: str
    predicate: Callable[[str], bool]
    invocations: int = 0

    def __call__(self, text: str) -> bool:
        self.invocations += 1
        return self.predicate(text)


def make_command_oracle(
    command: list[str], timeout_s: float = DEFAULT_TIMEOUT_S
) -> Oracle:
    """Run `command <candidate-path>`; exit 0 means interesting, and a
    timeout counts as uninteresting so reductions always terminate."""

    def predicate(text: str) -> bool:
        fd, path = tempfile.mkstemp(suffix=".mini", prefix="reduce-")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                fh.write(text)
            try:
                proc = subprocess.run(
                    command + [path],
                    capture_output=True,
                    timeout=timeout_s,
                )
            except subprocess.TimeoutExpired:
                return False
            return proc.returncode == 0
        finally:
            os.unlink(path)

    return Oracle(label=" ".join(command), predicate=predicate)


def make_crash_oracle(
    config_path: str,
    pattern: str,
    timeout_s: float = DEFAULT_TIMEOUT_S,
    analyzer_argv: Optional[list[str]] = None,
) -> Oracle:
    """Interesting iff the candidate parses, the analyzer exits with
    the internal-error code (2), and stderr matches `pattern` (so the
    reduction tracks the *same* error, not just any crash)."""
    regex = re.compile(pattern)
    argv = analyzer_argv or [sys.executable, "-m", "absint"]

    def predicate(text: str) -> bool:
        try:
            parse(text, "<candidate>")
        except ParseError:
            return False
        fd, path = tempfile.mkstemp(suffix=".mini", prefix="reduce-")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                fh.write(text)
            try:
                proc = subprocess.run(
                    argv + ["analyze", path, "--config", config_path, "--format", "json"],
                    capture_output=True,
                    text=True,
                    timeout=timeout_s,
                )
            except subprocess.TimeoutExpired:
                return False
            return proc.returncode == 2 and bool(regex.search(proc.stderr))
        finally:
            os.unlink(path)

    return Oracle(label=f"crash[{pattern}]", predicate=predicate)


def _verdicts(text: str, config_path: str) -> Optional[dict]:
    """Check key -> status map, or None when the analysis is unusable
    (parse failure or analyzer crash)."""
    try:
        program = parse(text, "<candidate>")
    except ParseError:
        return None
    config = load_config(config_path)
    try:
        analyzer = Analyzer(
            program,
            build_domain(config),
            AnalysisOptions.from_config(config),
            config_name=config.name,
            program_id="<candidate>",
        )
        report = analyzer.run()
    except ProgramError:
        return None
    if report.crash is not None:
        return None
    verdicts: dict[tuple, str] = {}
    for check in report.checks:
        key = (check.loc.line, check.kind.value)
        if verdicts.get(key) != ALARM:
            verdicts[key] = check.status
    return verdicts


def make_differential_oracle(
    config_a: str,
    config_b: str,
    check: Optional[tuple[Optional[str], int, str]] = None,
) -> Oracle:
    """Interesting iff both configurations analyze the candidate
    without crashing and their verdicts disagree.

    With `check` = (file, line, kind), the disagreement must be at that
    key (file matched by basename, "*" matches anything; reduction
    candidates live in temp files, so paths are not trusted).  Without
    it, any key that the first configuration calls safe and the second
    alarms is interesting: the soundness-relevant direction, with the
    suspect configuration first.
    """
    load_config(config_a)
    load_config(config_b)

    def predicate(text: str) -> bool:
        va = _verdicts(text, config_a)
        if va is None:
            return False
        vb = _verdicts(text, config_b)
        if vb is None:
            return False
        if check is not None:
            _, line, kind = check
            key = (line, kind)
            return key in va and key in vb and va[key] != vb[key]
        return any(
            va.get(key) == SAFE and status == ALARM for key, status in vb.items()
        )

    label = f"diff[{os.path.basename(config_a)} vs {os.path.basename(config_b)}]"
    return Oracle(label=label, predicate=predicate)
