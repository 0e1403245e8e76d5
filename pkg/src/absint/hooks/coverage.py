"""Abstract coverage: which statements the analysis reached with a
non-bottom state.

This differs from concrete test coverage: it measures where the
abstract execution went, so a dead else-branch under the inferred
invariants counts as uncovered even though no test ran at all.  Low
coverage of a function that should be reachable usually points at an
over-restrictive modeling assumption rather than at the program.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..ast import Call, FuncDef, Program, iter_stmts
from . import FunctionEnter, Hook, StmtBefore


@dataclass
class FunctionCoverage:
    total: int
    reached: set = field(default_factory=set)
    entered: bool = False

    @property
    def ratio(self) -> float:
        return len(self.reached) / self.total if self.total else 1.0


@dataclass
class CoverageSummary:
    functions: dict  # name -> dict
    overall_reached: int
    overall_total: int

    @property
    def overall(self) -> float:
        return self.overall_reached / self.overall_total if self.overall_total else 1.0

    def to_dict(self) -> dict:
        return {
            "overall": [self.overall_reached, self.overall_total],
            "functions": self.functions,
        }


class CoverageHook(Hook):
    name = "coverage"

    def __init__(self, program: Program):
        self.program = program
        self._stmt_locs: dict[str, set] = {}
        self._per_fn: dict[str, FunctionCoverage] = {}
        for fn in program.functions:
            locs = {s.loc.key() for s in iter_stmts(fn.body)}
            self._stmt_locs[fn.name] = locs
            self._per_fn[fn.name] = FunctionCoverage(total=len(locs))
        self._loc_to_fn: dict[tuple, str] = {}
        for name, locs in self._stmt_locs.items():
            for loc in locs:
                self._loc_to_fn[loc] = name

    def on_event(self, event) -> None:
        if isinstance(event, StmtBefore):
            if event.pre.is_bottom:
                return
            key = event.stmt.loc.key()
            fn = self._loc_to_fn.get(key)
            if fn is not None:
                self._per_fn[fn].reached.add(key)
        elif isinstance(event, FunctionEnter):
            if event.name in self._per_fn:
                self._per_fn[event.name].entered = True

    def reachable_from_entry(self) -> set[str]:
        """Static call-graph reachability; the overall ratio is computed
        over these functions so dead utility code does not dilute it."""
        defined = {fn.name: fn for fn in self.program.functions}
        seen: set[str] = set()
        work = [self.program.entry] if self.program.entry in defined else []
        while work:
            name = work.pop()
            if name in seen:
                continue
            seen.add(name)
            for stmt in iter_stmts(defined[name].body):
                if isinstance(stmt, Call) and stmt.name in defined:
                    work.append(stmt.name)
        return seen

    def summary(self) -> CoverageSummary:
        reachable = self.reachable_from_entry()
        functions: dict[str, dict] = {}
        total = reached = 0
        for fn in self.program.functions:
            cov = self._per_fn[fn.name]
            uncovered = sorted(self._stmt_locs[fn.name] - cov.reached)
            functions[fn.name] = {
                "reached": len(cov.reached),
                "total": cov.total,
                "uncovered": [
                    {"file": f, "line": l, "col": c} for (f, l, c) in uncovered
                ],
                "never_analyzed": not cov.entered and not cov.reached,
            }
            if fn.name in reachable:
                total += cov.total
                reached += len(cov.reached)
        return CoverageSummary(functions, reached, total)
