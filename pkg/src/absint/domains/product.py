"""Reduced product of the interval and zone domains.

Both components track every variable; after each transfer the
reduction exchanges bounds so each side is at least as tight as the
other's projection.  Widening is componentwise and deliberately skips
reduction (tightening a widened head can re-enable growth and break
termination); queried copies are reduced via `prepare`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from ..ast import Expr
from .base import Domain, Evaluator, Resolver
from .dbm import DBM, ZoneDomain, _unary_meet
from .interval import (
    Interval,
    IntervalDomain,
    IntervalEnv,
    ThresholdSet,
    interval_meet,
)


@dataclass(frozen=True)
class ProductState:
    itv: IntervalEnv
    dbm: DBM
    reduced: bool = False


class ProductDomain(Domain):
    name = "product(intervals, zones)"

    def __init__(self) -> None:
        self.intervals = IntervalDomain()
        self.zones = ZoneDomain()

    def make_top(self, varnames: Sequence[str]) -> ProductState:
        return ProductState(
            self.intervals.make_top(varnames), self.zones.make_top(varnames), True
        )

    def bottom_like(self, value: ProductState) -> ProductState:
        return ProductState(
            self.intervals.bottom_like(value.itv),
            self.zones.bottom_like(value.dbm),
            True,
        )

    def is_bottom(self, value: ProductState) -> bool:
        return self.intervals.is_bottom(value.itv) or self.zones.is_bottom(value.dbm)

    def reduce(self, value: ProductState) -> ProductState:
        """Tighten each component with the other's per-variable bounds;
        any bottom component collapses the whole product."""
        if self.is_bottom(value):
            return self.bottom_like(value)
        itv = value.itv
        dbm = value.dbm.close()
        for var, iv in value.itv.vars:
            proj = self.zones.project(dbm, var)
            tight = interval_meet(iv, proj)
            if tight.empty:
                return self.bottom_like(value)
            itv = itv.with_var(var, tight)
            dbm = _unary_meet(dbm, dbm.index(var), tight.lo, tight.hi)
            if dbm.empty:
                return self.bottom_like(value)
        return ProductState(itv, dbm, True)

    def prepare(self, value: ProductState) -> ProductState:
        return self.reduce(value)

    def join(self, a: ProductState, b: ProductState) -> ProductState:
        if self.is_bottom(a):
            return b
        if self.is_bottom(b):
            return a
        return ProductState(
            self.intervals.join(a.itv, b.itv), self.zones.join(a.dbm, b.dbm)
        )

    def meet(self, a: ProductState, b: ProductState) -> ProductState:
        return self.reduce(
            ProductState(
                self.intervals.meet(a.itv, b.itv), self.zones.meet(a.dbm, b.dbm)
            )
        )

    def widen(
        self, a: ProductState, b: ProductState, thresholds: ThresholdSet
    ) -> ProductState:
        if self.is_bottom(a):
            return b
        if self.is_bottom(b):
            return a
        return ProductState(
            self.intervals.widen(a.itv, b.itv, thresholds),
            self.zones.widen(a.dbm, b.dbm, thresholds),
        )

    def leq(self, a: ProductState, b: ProductState) -> bool:
        if self.is_bottom(a):
            return True
        if self.is_bottom(b):
            return False
        return self.intervals.leq(a.itv, b.itv) and self.zones.leq(a.dbm, b.dbm)

    def declare(self, value: ProductState, var: str, init: Interval) -> ProductState:
        return ProductState(
            self.intervals.declare(value.itv, var, init),
            self.zones.declare(value.dbm, var, init),
        )

    def forget(self, value: ProductState, var: str) -> ProductState:
        return ProductState(
            self.intervals.forget(value.itv, var), self.zones.forget(value.dbm, var)
        )

    def havoc(self, value: ProductState, var: str, interval: Interval) -> ProductState:
        return ProductState(
            self.intervals.havoc(value.itv, var, interval),
            self.zones.havoc(value.dbm, var, interval),
        )

    def refine(self, value: ProductState, var: str, interval: Interval) -> ProductState:
        return self.reduce(
            ProductState(
                self.intervals.refine(value.itv, var, interval),
                self.zones.refine(value.dbm, var, interval),
            )
        )

    def assign(
        self,
        value: ProductState,
        var: str,
        expr: Expr,
        resolve: Resolver,
        rhs: Interval,
    ) -> Optional[ProductState]:
        itv = self.intervals.assign(value.itv, var, expr, resolve, rhs)
        dbm = self.zones.assign(value.dbm, var, expr, resolve, rhs)
        return self.reduce(ProductState(itv, dbm))

    def assume_cmp(
        self,
        value: ProductState,
        op: str,
        lhs: Expr,
        rhs: Expr,
        resolve: Resolver,
        evaluate: Evaluator,
    ) -> Optional[ProductState]:
        itv = self.intervals.assume_cmp(value.itv, op, lhs, rhs, resolve, evaluate)
        dbm = self.zones.assume_cmp(value.dbm, op, lhs, rhs, resolve, evaluate)
        if itv is None and dbm is None:
            return None
        return self.reduce(
            ProductState(
                itv if itv is not None else value.itv,
                dbm if dbm is not None else value.dbm,
            )
        )

    def project(self, value: ProductState, var: str) -> Interval:
        return interval_meet(
            self.intervals.project(value.itv, var), self.zones.project(value.dbm, var)
        )

    def constraints_for(
        self, value: ProductState, var: str, display: Callable[[str], Optional[str]]
    ) -> list[str]:
        return self.zones.constraints_for(value.dbm, var, display)

    def render(self, value: ProductState, scope: dict[str, str]) -> list[str]:
        if self.is_bottom(value):
            return ["⊥ (unreachable)"]
        reduced = self.reduce(value)
        lines = [
            f"{name} ∈ {self.project(reduced, qual)!r}" for name, qual in scope.items()
        ]
        back = {qual: name for name, qual in scope.items()}
        seen: set[str] = set()
        for name, qual in scope.items():
            for line in self.zones.constraints_for(reduced.dbm, qual, lambda q: back.get(q)):
                if line not in seen:
                    seen.add(line)
                    lines.append(line)
        return lines
