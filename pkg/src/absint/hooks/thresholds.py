"""Widening threshold collection.

Scans the program for integer literals used in comparisons and turns
them (plus their off-by-one neighbors) into widening landmarks, so
loops like `while (i < 10)` stabilize at the exact bound instead of
jumping to the type range.  This is the one sanctioned way observers
influence the analysis, and it is routed through the configuration
(thresholds: "collected"), keeping the event bus itself pure.
"""

from __future__ import annotations

from ..ast import Binop, CMP_OPS, IntLit, Program, iter_exprs, iter_stmts, stmt_exprs
from ..domains.interval import ThresholdSet
from . import Hook


def collect_thresholds(program: Program) -> ThresholdSet:
    found: set[int] = set()
    for fn in program.functions:
        for stmt in iter_stmts(fn.body):
            for expr in stmt_exprs(stmt):
                if not (isinstance(expr, Binop) and expr.op in CMP_OPS):
                    continue
                for side in (expr.lhs, expr.rhs):
                    for sub in iter_exprs(side):
                        if isinstance(sub, IntLit):
                            found.update((sub.value - 1, sub.value, sub.value + 1))
    return ThresholdSet.default().with_extra(found)


class ThresholdsHook(Hook):
    """Observer wrapper exposing the collected set (for CLI display)."""

    name = "thresholds"

    def __init__(self, program: Program):
        self.thresholds = collect_thresholds(program)

    def on_event(self, event) -> None:
        pass
