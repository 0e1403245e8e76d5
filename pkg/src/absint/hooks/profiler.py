"""Abstract profiling: where the analysis spends its effort.

Loops and calls are the two reasons the same code is analyzed many
times (fixpoint iterations, context-sensitive inlining), so the
profiler tracks both: per-loop visit counts, iterations to fixpoint and
time, and per-callstack call counts with self/total time.  The function
data folds into the standard flamegraph text format, one line per
distinct root-first stack with self time in integer microseconds.

Everything works on partial executions: the accumulators can be
snapshotted while the analysis (or a debugger session) is mid-flight.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from . import FunctionEnter, FunctionExit, Hook, LoopIteration, StmtAfter, StmtBefore
from ..ast import While


@dataclass
class LoopProfile:
    visits: int = 0
    iterations: list[int] = field(default_factory=list)
    total_ns: int = 0


@dataclass
class FunctionProfile:
    calls: int = 0
    self_ns: int = 0
    total_ns: int = 0


class ProfilerHook(Hook):
    name = "profile"

    def __init__(self, clock=time.perf_counter_ns):
        self._clock = clock
        self.loops: dict[tuple, LoopProfile] = {}
        self.functions: dict[tuple[str, ...], FunctionProfile] = {}
        # open frames: [stack tuple, start ns, child time ns]
        self._frames: list[list] = []
        # open loop visits: [loc key, start ns, iteration count]
        self._loops: list[list] = []

    def on_event(self, event) -> None:
        now = self._clock
        if isinstance(event, FunctionEnter):
            self._frames.append([tuple(event.callstack), now(), 0])
        elif isinstance(event, FunctionExit):
            if not self._frames:
                return
            stack, start, child = self._frames.pop()
            total = now() - start
            prof = self.functions.setdefault(stack, FunctionProfile())
            prof.calls += 1
            prof.total_ns += total
            prof.self_ns += max(total - child, 0)
            if self._frames:
                self._frames[-1][2] += total
        elif isinstance(event, LoopIteration):
            if self._loops and self._loops[-1][0] == event.loc.key():
                self._loops[-1][2] += 1
        elif isinstance(event, StmtBefore):
            if isinstance(event.stmt, While):
                self._loops.append([event.stmt.loc.key(), now(), 0])
        elif isinstance(event, StmtAfter):
            if isinstance(event.stmt, While) and self._loops:
                key, start, iters = self._loops.pop()
                prof = self.loops.setdefault(key, LoopProfile())
                prof.visits += 1
                prof.iterations.append(iters)
                prof.total_ns += now() - start

    # -- snapshots (usable mid-analysis) --

    def _snapshot_functions(self) -> dict[tuple[str, ...], FunctionProfile]:
        out = {k: FunctionProfile(v.calls, v.self_ns, v.total_ns) for k, v in self.functions.items()}
        now = self._clock()
        for stack, start, child in self._frames:
            prof = out.setdefault(stack, FunctionProfile())
            total = now - start
            prof.calls += 1
            prof.total_ns += total
            prof.self_ns += max(total - child, 0)
        return out

    def folded_stacks(self) -> list[str]:
        """Flamegraph folded format: "main;f;g 1234", counts are self
        time in microseconds, sorted by stack for determinism."""
        lines = []
        for stack, prof in sorted(self._snapshot_functions().items()):
            lines.append(f"{';'.join(stack)} {prof.self_ns // 1000}")
        return lines

    def profile_dict(self) -> dict:
        loops = []
        for (f, l, c), prof in sorted(self.loops.items()):
            loops.append(
                {
                    "file": f,
                    "line": l,
                    "col": c,
                    "visits": prof.visits,
                    "iterations": prof.iterations,
                    "total_us": prof.total_ns // 1000,
                }
            )
        functions = []
        for stack, prof in sorted(self._snapshot_functions().items()):
            functions.append(
                {
                    "callstack": list(stack),
                    "calls": prof.calls,
                    "self_us": prof.self_ns // 1000,
                    "total_us": prof.total_ns // 1000,
                }
            )
        return {"loops": loops, "functions": functions}
