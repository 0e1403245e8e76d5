"""Heuristic unsoundness and imprecision detection.

The unsoundness detector enforces a sanity property of sound analyses:
an assignment analyzed from a non-bottom state cannot produce a bottom
state, unless the right-hand side contained a runtime error (a division
by zero kills the state legitimately).  A violation means a domain bug,
which is critical; the detector points at the statement so it can be
reduced and fixed.

The imprecision detector flags (sub)expressions whose abstract value is
the full i32 range: the usual source of avalanching precision loss.
Direct reads of entry parameters are exempt, since those are symbolic
(full range) by design and would drown real warnings.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..ast import Assign, Decl, I32_MAX, I32_MIN, Program, Var
from ..domains.interval import ext_le
from . import AlarmRaised, ExprEvaluated, Hook, StmtAfter, StmtBefore


@dataclass(frozen=True)
class Warning:
    kind: str
    loc: object
    message: str

    def __str__(self) -> str:
        return f"{self.kind}: {self.loc}: {self.message}"


class UnsoundnessDetector(Hook):
    name = "unsoundness"

    def __init__(self):
        self.warnings: list[Warning] = []
        # alarm-seen flags for the in-flight statement nest
        self._stack: list[bool] = []

    def on_event(self, event) -> None:
        if isinstance(event, StmtBefore):
            self._stack.append(False)
        elif isinstance(event, AlarmRaised):
            if self._stack:
                self._stack[-1] = True
        elif isinstance(event, StmtAfter):
            had_alarm = self._stack.pop() if self._stack else False
            stmt = event.stmt
            if not isinstance(stmt, (Assign, Decl)):
                return
            if event.pre.is_bottom or not event.post.is_bottom or had_alarm:
                return
            self.warnings.append(
                Warning(
                    "unsoundness",
                    stmt.loc,
                    "assignment from a non-bottom state returned bottom "
                    "with no runtime error recorded",
                )
            )


class ImprecisionDetector(Hook):
    name = "imprecision"

    def __init__(self, program: Program):
        self.warnings: list[Warning] = []
        self._seen: set = set()
        entry = program.function(program.entry)
        self._entry = program.entry
        self._entry_params = set(entry.params) if entry else set()

    def on_event(self, event) -> None:
        if not isinstance(event, ExprEvaluated):
            return
        value = event.value
        if value.empty or not (ext_le(value.lo, I32_MIN) and ext_le(I32_MAX, value.hi)):
            return
        expr = event.expr
        if (
            isinstance(expr, Var)
            and expr.name in self._entry_params
            and event.callstack == (self._entry,)
        ):
            return  # symbolic arguments are full-range by design
        key = (expr.loc.key(), event.callstack)
        if key in self._seen:
            return
        self._seen.add(key)
        self.warnings.append(
            Warning("imprecision", expr.loc, "expression evaluates to the full i32 range")
        )
