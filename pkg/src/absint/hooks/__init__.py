"""Observer plug-ins over the abstract execution.

Hooks receive events before and after every analyzed statement, on
every recorded expression evaluation, at function entry/exit, per loop
iteration, and on every alarm detection.  They see abstract states only
through read-only views (projection and printing), never the domains'
internal representation, and a faulty hook is quarantined rather than
allowed to kill the analysis.

The shipped observers are pure: enabling them never changes the
analysis result.  The one sanctioned influence channel is widening
thresholds, and it runs through the configuration (thresholds
"collected"), not through the event bus.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from ..ast import Expr, SourceLoc, Stmt
from ..checks import CheckRecord
from ..domains.interval import Interval


class StateView:
    """Read-only window onto an abstract state: queries only."""

    def __init__(self, domain, value, scope: dict[str, str]):
        self._domain = domain
        self._value = value
        self._scope = dict(scope)

    @property
    def is_bottom(self) -> bool:
        return self._domain.is_bottom(self._value)

    def variables(self) -> list[str]:
        return list(self._scope)

    def project(self, name: str) -> Interval:
        return self._domain.project(self._value, self._scope[name])

    def render(self) -> list[str]:
        return self._domain.render(self._value, self._scope)


@dataclass(frozen=True)
class StmtBefore:
    stmt: Stmt
    pre: StateView


@dataclass(frozen=True)
class StmtAfter:
    stmt: Stmt
    pre: StateView
    post: StateView


@dataclass(frozen=True)
class ExprEvaluated:
    expr: Expr
    value: Interval
    callstack: tuple[str, ...]


@dataclass(frozen=True)
class FunctionEnter:
    name: str
    callstack: tuple[str, ...]


@dataclass(frozen=True)
class FunctionExit:
    name: str
    elapsed_ns: int


@dataclass(frozen=True)
class LoopIteration:
    loc: SourceLoc
    index: int


@dataclass(frozen=True)
class AlarmRaised:
    check: CheckRecord


HookEvent = object


class Hook:
    name = "hook"

    def on_event(self, event: HookEvent) -> None:
        raise NotImplementedError


class HookBus:
    """Dispatches events to registered hooks in registration order.  A
    hook that raises is disabled for the rest of the analysis and the
    failure is noted for the report."""

    def __init__(self, hooks: Optional[list[Hook]] = None):
        self.hooks: list[Hook] = list(hooks or [])
        self._disabled: set[int] = set()
        self.failures: list[str] = []

    def register(self, hook: Hook) -> None:
        self.hooks.append(hook)

    def dispatch(self, event: HookEvent) -> None:
        if not self.hooks:
            return
        for i, hook in enumerate(self.hooks):
            if i in self._disabled:
                continue
            try:
                hook.on_event(event)
            except Exception as exc:  # quarantine, never kill the analysis
                self._disabled.add(i)
                self.failures.append(f"hook disabled: {hook.name}: {exc}")


from .coverage import CoverageHook, CoverageSummary  # noqa: E402
from .profiler import ProfilerHook  # noqa: E402
from .detectors import ImprecisionDetector, UnsoundnessDetector  # noqa: E402
from .thresholds import collect_thresholds  # noqa: E402
from .trace import TraceHook  # noqa: E402

__all__ = [
    "AlarmRaised",
    "CoverageHook",
    "CoverageSummary",
    "ExprEvaluated",
    "FunctionEnter",
    "FunctionExit",
    "Hook",
    "HookBus",
    "ImprecisionDetector",
    "LoopIteration",
    "ProfilerHook",
    "StateView",
    "StmtAfter",
    "StmtBefore",
    "TraceHook",
    "UnsoundnessDetector",
    "collect_thresholds",
]
