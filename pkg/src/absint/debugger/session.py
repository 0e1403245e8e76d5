"""Interactive control over an abstract execution.

The analysis runs in a worker thread and parks at checkpoints (before
each statement, at recorded expression evaluations, on function entry,
on recorded alarms).  The driver thread resumes it with a stepping mode
and waits for the next stop, so exactly one thread touches analyzer
state at any time and every paused state is an ordinary immutable
domain value.

On an alarm stop the session presents the state and statement reached
just before the alarm fired (the pre-state of the in-flight statement),
which is cheap to retain since states are immutable.  Driving a session
with nothing but "continue" produces the same report as the batch
analyzer, which the test suite checks byte-for-byte (minus timing).
"""

from __future__ import annotations

import queue
import threading
from dataclasses import dataclass, field
from typing import Optional, Union

from ..ast import Program, SourceLoc, Stmt, expr_str, iter_stmts, stmt_kind
from ..checks import CheckRecord, Report
from ..domains import Domain
from ..engine.analyzer import AbortAnalysis, AnalysisOptions, Analyzer, Checkpoint
from ..hooks import HookBus


class DebugError(Exception):
    """User-level session error (unknown variable, command after the
    analysis finished); the session itself stays usable."""


@dataclass(frozen=True)
class LocationBP:
    file: Optional[str]
    line: int


@dataclass(frozen=True)
class FunctionBP:
    name: str


@dataclass(frozen=True)
class KindBP:
    kind: str  # statement constructor name: "while", "assign", ...


@dataclass(frozen=True)
class AlarmBP:
    pass


Breakpoint = Union[LocationBP, FunctionBP, KindBP, AlarmBP]


@dataclass
class StopState:
    reason: str  # "entry" | "breakpoint" | "alarm" | "step" | "finished"
    loc: Optional[SourceLoc] = None
    function: str = ""
    detail: str = ""  # statement kind or expression text
    callstack: list[tuple[str, Optional[SourceLoc]]] = field(default_factory=list)
    iteration: Optional[int] = None  # loop iteration index, when inside one
    alarm: Optional[CheckRecord] = None


class _SessionCheckpoint(Checkpoint):
    def __init__(self, session: "DebugSession"):
        self.session = session

    def on_stmt(self, analyzer, stmt, state):
        self.session._worker_stmt(analyzer, stmt, state)

    def on_expr(self, analyzer, expr, value):
        self.session._worker_expr(analyzer, expr, value)

    def on_enter(self, analyzer, name):
        self.session._worker_enter(analyzer, name)

    def on_alarm(self, analyzer, check):
        self.session._worker_alarm(analyzer, check)


class DebugSession:
    def __init__(
        self,
        program: Program,
        domain: Domain,
        options: Optional[AnalysisOptions] = None,
        hooks: Optional[HookBus] = None,
        config_name: str = "custom",
        program_id: str = "<memory>",
    ):
        self.program = program
        self.analyzer = Analyzer(
            program,
            domain,
            options,
            hooks=hooks,
            config_name=config_name,
            program_id=program_id,
            checkpoint=_SessionCheckpoint(self),
        )
        self.breakpoints: list[Breakpoint] = []
        self.report: Optional[Report] = None
        self.finished = False
        self.current: Optional[StopState] = None
        self._stmt_lines = {
            (s.loc.file, s.loc.line)
            for fn in program.functions
            for s in iter_stmts(fn.body)
        }
        self._mode = "entry"
        self._target_depth = 0
        self._pending_function_bp = False
        self._commands: "queue.Queue[str]" = queue.Queue()
        self._stops: "queue.Queue[StopState]" = queue.Queue()
        # set by the worker right before it parks
        self._paused_state = None
        self._paused_scope: dict[str, str] = {}
        self._thread = threading.Thread(target=self._run_worker, daemon=True)
        self._started = False

    # -- driver API --

    def start(self) -> StopState:
        """Launch the analysis; stops before the first statement."""
        assert not self._started
        self._started = True
        self._thread.start()
        return self._wait_stop()

    def add_breakpoint(self, bp: Breakpoint) -> tuple[bool, str]:
        """Returns (verified, message); a location that matches no
        statement line is kept but flagged."""
        self.breakpoints.append(bp)
        if isinstance(bp, LocationBP):
            hit = any(
                line == bp.line and (bp.file is None or f.endswith(bp.file))
                for (f, line) in self._stmt_lines
            )
            if not hit:
                return False, f"warning: no statement at line {bp.line}"
        return True, ""

    def clear_breakpoints(self) -> None:
        self.breakpoints = []

    def resume(self, mode: str) -> StopState:
        """mode: continue | next | step | finish."""
        if self.finished:
            raise DebugError("analysis complete")
        depth = len(self.analyzer.frames)
        self._mode = mode
        self._target_depth = depth if mode != "finish" else depth - 1
        self._commands.put("go")
        return self._wait_stop()

    def quit(self) -> None:
        if self._started and not self.finished:
            self._commands.put("abort")
            self._thread.join(timeout=5)

    def run_to_completion(self) -> Report:
        while not self.finished:
            self.resume("continue")
        assert self.report is not None
        return self.report

    # -- inspection (valid while stopped) --

    def render_print(self, name: Optional[str] = None) -> list[str]:
        if self._paused_state is None:
            if self.report is not None:
                raise DebugError("analysis complete")
            raise DebugError("not stopped")
        domain = self.analyzer.domain
        value = self._paused_state
        scope = self._paused_scope
        if name is None:
            return domain.render(value, scope)
        if name not in scope:
            known = ", ".join(scope) or "none"
            raise DebugError(f"unknown variable {name!r}; in scope: {known}")
        qual = scope[name]
        lines = [f"{name} ∈ {domain.project(value, qual)!r}"]
        back = {q: n for n, q in scope.items()}
        lines.extend(domain.constraints_for(value, qual, lambda q: back.get(q)))
        return lines

    def backtrace(self) -> list[str]:
        if self.current is None:
            raise DebugError("not stopped")
        lines = []
        frames = list(reversed(self.current.callstack))
        for i, (fn, call_loc) in enumerate(frames):
            at = f" (called from {call_loc})" if call_loc else ""
            lines.append(f"#{i} {fn}{at}")
        return lines

    # -- worker side --

    def _run_worker(self) -> None:
        try:
            self.report = self.analyzer.run()
        except AbortAnalysis:
            return
        except Exception as exc:  # defensive: surface, don't hang the driver
            self._stops.put(StopState(reason="finished", detail=f"worker error: {exc}"))
            self.finished = True
            return
        self.finished = True
        self._stops.put(StopState(reason="finished"))

    def _wait_stop(self) -> StopState:
        stop = self._stops.get(timeout=600)
        self.current = stop
        return stop

    def _park(self, analyzer: Analyzer, stop: StopState, stmt_state) -> None:
        self._paused_state = stmt_state
        self._paused_scope = dict(analyzer.frames[-1].scope)
        stop.callstack = [(f.fn, f.call_loc) for f in analyzer.frames]
        if analyzer.loop_stack:
            stop.iteration = analyzer.loop_stack[-1][1]
        self._stops.put(stop)
        cmd = self._commands.get()
        if cmd == "abort":
            raise AbortAnalysis()

    def _match_stmt_bp(self, stmt: Stmt) -> bool:
        for bp in self.breakpoints:
            if isinstance(bp, LocationBP):
                if stmt.loc.line == bp.line and (
                    bp.file is None or stmt.loc.file.endswith(bp.file)
                ):
                    return True
            elif isinstance(bp, KindBP) and stmt_kind(stmt) == bp.kind:
                return True
        return False

    def _worker_stmt(self, analyzer: Analyzer, stmt: Stmt, state) -> None:
        depth = len(analyzer.frames)
        reason = None
        if self._pending_function_bp:
            self._pending_function_bp = False
            reason = "breakpoint"
        elif self._match_stmt_bp(stmt):
            reason = "breakpoint"
        elif self._mode == "entry":
            reason = "entry"
        elif self._mode == "step":
            reason = "step"
        elif self._mode in ("next", "finish") and depth <= self._target_depth:
            # next targets the frame it was issued in, finish one up
            reason = "step"
        if reason is None:
            return
        self._park(
            analyzer,
            StopState(
                reason=reason,
                loc=stmt.loc,
                function=analyzer.frames[-1].fn,
                detail=stmt_kind(stmt),
            ),
            state,
        )

    def _worker_expr(self, analyzer: Analyzer, expr, value) -> None:
        if self._mode != "step":
            return
        if not analyzer.stmt_stack:
            return
        stmt, pre = analyzer.stmt_stack[-1]
        self._park(
            analyzer,
            StopState(
                reason="step",
                loc=expr.loc,
                function=analyzer.frames[-1].fn,
                detail=f"{expr_str(expr)} = {value!r}",
            ),
            pre,
        )

    def _worker_enter(self, analyzer: Analyzer, name: str) -> None:
        if any(isinstance(bp, FunctionBP) and bp.name == name for bp in self.breakpoints):
            self._pending_function_bp = True

    def _worker_alarm(self, analyzer: Analyzer, check: CheckRecord) -> None:
        if not any(isinstance(bp, AlarmBP) for bp in self.breakpoints):
            return
        # jump back: present the statement being analyzed and its
        # pre-state, i.e. the state just before the alarm triggered
        if analyzer.stmt_stack:
            stmt, pre = analyzer.stmt_stack[-1]
            loc, detail = stmt.loc, stmt_kind(stmt)
        else:
            stmt, pre, loc, detail = None, None, check.loc, ""
        self._park(
            analyzer,
            StopState(
                reason="alarm",
                loc=loc,
                function=analyzer.frames[-1].fn,
                detail=detail,
                alarm=check,
            ),
            pre,
        )
