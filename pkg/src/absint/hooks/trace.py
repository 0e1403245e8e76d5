"""Interpretation trace: the order in which statements and expressions
are analyzed, as an indented line stream.

Loop bodies appear once per fixpoint iteration, function bodies once
per inlined call, and re-typed (machine-to-math) operations show up
with their rewritten type, which makes the rewriting visible.  At full
verbosity each statement is followed by a print of its post state.
Traces of real analyses get enormous; prefer the debugger for
interactive spelunking.
"""

from __future__ import annotations

from typing import IO, Optional

from ..ast import IntType, expr_str, stmt_kind
from . import (
    AlarmRaised,
    ExprEvaluated,
    FunctionEnter,
    FunctionExit,
    Hook,
    LoopIteration,
    StmtAfter,
    StmtBefore,
)


class TraceHook(Hook):
    name = "trace"

    def __init__(self, stream: Optional[IO[str]] = None, verbosity: str = "normal"):
        self.lines: list[str] = []
        self._stream = stream
        self._verbosity = verbosity
        self._depth = 0

    def _emit(self, text: str) -> None:
        line = "  " * self._depth + text
        self.lines.append(line)
        if self._stream is not None:
            self._stream.write(line + "\n")

    def on_event(self, event) -> None:
        if isinstance(event, FunctionEnter):
            self._emit(f"enter {event.name}")
            self._depth += 1
        elif isinstance(event, FunctionExit):
            self._depth = max(self._depth - 1, 0)
            self._emit(f"exit {event.name} ({event.elapsed_ns / 1e6:.2f} ms)")
        elif isinstance(event, StmtBefore):
            self._emit(f"stmt {event.stmt.loc} {stmt_kind(event.stmt)}")
            self._depth += 1
        elif isinstance(event, StmtAfter):
            self._depth = max(self._depth - 1, 0)
            if self._verbosity == "full":
                for line in event.post.render():
                    self._emit(f"| {line}")
        elif isinstance(event, ExprEvaluated):
            ty = ""
            if getattr(event.expr, "ty", None) is IntType.MATH:
                ty = " : math"
            self._emit(f"expr {event.expr.loc} ({expr_str(event.expr)}{ty}) = {event.value!r}")
        elif isinstance(event, LoopIteration):
            self._emit(f"loop-iteration {event.loc} #{event.index}")
        elif isinstance(event, AlarmRaised):
            check = event.check
            self._emit(f"alarm {check.kind.value} {check.loc}")
