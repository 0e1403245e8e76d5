"""Difference bound matrices (zones): the relational domain.

A DBM over variables v1..vn plus the constant zero variable v0 stores
at m[i][j] an upper bound on vi - vj (with +inf for "unconstrained").
Unary bounds live against v0: vi <= c is m[i][0] = c, vi >= c is
m[0][i] = -c.  Shortest-path (Floyd-Warshall) closure normalizes the
matrix; a negative diagonal entry after closure means the constraint
system is infeasible (bottom).

Widened loop heads are intentionally left unclosed: re-closing a
widened matrix can tighten entries back and forth forever, so closure
is applied to working copies used for queries and transfers only.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from ..ast import Binop, Expr, IntLit, Rand, Var
from .base import Domain, Evaluator, Resolver
from .interval import (
    BOTTOM,
    Ext,
    Interval,
    MINF,
    PINF,
    ThresholdSet,
    _Inf,
    ext_add,
    ext_le,
    ext_lt,
    ext_min,
    ext_neg,
    interval_meet,
    mk,
    singleton,
)

Matrix = tuple[tuple[Ext, ...], ...]


def _fresh(n: int) -> list[list[Ext]]:
    return [[0 if i == j else PINF for j in range(n)] for i in range(n)]


@dataclass(frozen=True)
class DBM:
    vars: tuple[str, ...]  # qualified names; matrix index = position + 1
    m: Matrix
    empty: bool = False
    closed: bool = False

    # -- construction --

    @classmethod
    def top(cls, varnames: Sequence[str]) -> "DBM":
        n = len(varnames) + 1
        return cls(tuple(varnames), _freeze(_fresh(n)), closed=True)

    @classmethod
    def bottom(cls, varnames: Sequence[str]) -> "DBM":
        n = len(varnames) + 1
        return cls(tuple(varnames), _freeze(_fresh(n)), empty=True, closed=True)

    def index(self, var: str) -> int:
        return self.vars.index(var) + 1

    def bound(self, i: int, j: int) -> Ext:
        return self.m[i][j]

    # -- closure --

    def close(self) -> "DBM":
        """All-pairs tightening; detects infeasibility.  Idempotent."""
        if self.empty or self.closed:
            return self
        n = len(self.vars) + 1
        w = [list(row) for row in self.m]
        for k in range(n):
            wk = w[k]
            for i in range(n):
                wik = w[i][k]
                if wik is PINF:
                    continue
                wi = w[i]
                for j in range(n):
                    via = ext_add(wik, wk[j]) if wk[j] is not PINF else PINF
                    if via is not PINF and ext_lt(via, wi[j]):
                        wi[j] = via
        for i in range(n):
            if ext_lt(w[i][i], 0):
                return DBM.bottom(self.vars)
            w[i][i] = 0
        return DBM(self.vars, _freeze(w), closed=True)


def _freeze(w: list[list[Ext]]) -> Matrix:
    return tuple(tuple(row) for row in w)


def dbm_join(a: DBM, b: DBM) -> DBM:
    if a.empty:
        return b.close()
    if b.empty:
        return a.close()
    a, b = a.close(), b.close()
    if a.empty or b.empty:
        return a if b.empty else b
    assert a.vars == b.vars, "join over mismatched scopes"
    n = len(a.vars) + 1
    w = [
        [a.m[i][j] if ext_le(b.m[i][j], a.m[i][j]) else b.m[i][j] for j in range(n)]
        for i in range(n)
    ]
    # Entrywise max of two closed matrices is closed.
    return DBM(a.vars, _freeze(w), closed=True)


def dbm_meet(a: DBM, b: DBM) -> DBM:
    if a.empty or b.empty:
        return DBM.bottom(a.vars)
    assert a.vars == b.vars
    n = len(a.vars) + 1
    w = [[ext_min(a.m[i][j], b.m[i][j]) for j in range(n)] for i in range(n)]
    return DBM(a.vars, _freeze(w), closed=False).close()


def dbm_widen(a: DBM, b: DBM) -> DBM:
    """Keep a's entry where b's is no larger, else drop to +inf.  The
    result is returned unclosed on purpose (see module docstring)."""
    if a.empty:
        return b
    if b.empty:
        return a
    b = b.close()
    if b.empty:
        return a
    assert a.vars == b.vars
    n = len(a.vars) + 1
    w = [
        [a.m[i][j] if ext_le(b.m[i][j], a.m[i][j]) else PINF for j in range(n)]
        for i in range(n)
    ]
    for i in range(n):
        w[i][i] = 0
    return DBM(a.vars, _freeze(w), closed=False)


def dbm_leq(a: DBM, b: DBM) -> bool:
    a = a.close()
    if a.empty:
        return True
    if b.empty:
        return False
    assert a.vars == b.vars
    n = len(a.vars) + 1
    return all(ext_le(a.m[i][j], b.m[i][j]) for i in range(n) for j in range(n))


class ZoneDomain(Domain):
    name = "zones"

    def make_top(self, varnames: Sequence[str]) -> DBM:
        return DBM.top(varnames)

    def bottom_like(self, value: DBM) -> DBM:
        return DBM.bottom(value.vars)

    def is_bottom(self, value: DBM) -> bool:
        return value.close().empty

    def join(self, a: DBM, b: DBM) -> DBM:
        return dbm_join(a, b)

    def meet(self, a: DBM, b: DBM) -> DBM:
        return dbm_meet(a, b)

    def widen(self, a: DBM, b: DBM, thresholds: ThresholdSet) -> DBM:
        return dbm_widen(a, b)

    def leq(self, a: DBM, b: DBM) -> bool:
        return dbm_leq(a, b)

    def prepare(self, value: DBM) -> DBM:
        return value.close()

    def declare(self, value: DBM, var: str, init: Interval) -> DBM:
        value = value.close()
        if value.empty or init.empty:
            return DBM.bottom(value.vars + (var,))
        n = len(value.vars) + 1
        w = [list(row) + [PINF] for row in value.m]
        w.append([PINF] * (n + 1))
        w[n][n] = 0
        out = DBM(value.vars + (var,), _freeze(w), closed=True)
        return _unary_meet(out, n, init.lo, init.hi)

    def forget(self, value: DBM, var: str) -> DBM:
        """Drop the variable's dimension entirely (scope exit)."""
        value = value.close()
        if var not in value.vars:
            return value
        x = value.index(var)
        keep = [i for i in range(len(value.vars) + 1) if i != x]
        w = [[value.m[i][j] for j in keep] for i in keep]
        names = tuple(v for v in value.vars if v != var)
        return DBM(names, _freeze(w), empty=value.empty, closed=value.closed)

    def havoc(self, value: DBM, var: str, interval: Interval) -> DBM:
        value = value.close()
        if value.empty:
            return value
        if interval.empty:
            return DBM.bottom(value.vars)
        out = _havoc(value, value.index(var))
        return _unary_meet(out, out.index(var), interval.lo, interval.hi)

    def refine(self, value: DBM, var: str, interval: Interval) -> DBM:
        value = value.close()
        if value.empty:
            return value
        if interval.empty:
            return DBM.bottom(value.vars)
        return _unary_meet(value, value.index(var), interval.lo, interval.hi)

    def assign(
        self,
        value: DBM,
        var: str,
        expr: Expr,
        resolve: Resolver,
        rhs: Interval,
    ) -> Optional[DBM]:
        value = value.close()
        if value.empty:
            return value
        if rhs.empty:
            return DBM.bottom(value.vars)
        x = value.index(var)
        form = _as_var_plus_const(expr, resolve)
        if isinstance(expr, IntLit):
            out = _set_const(value, x, expr.value)
        elif form is not None and form[0] == var:
            out = _self_shift(value, x, form[1])
        elif form is not None and form[0] in value.vars:
            out = _copy_shift(value, x, value.index(form[0]), form[1])
        else:
            out = _havoc(value, x)
        # Post-error continuation and fallback bounds: the caller's rhs
        # projection is already clamped to i32 when an overflow alarm
        # was recorded, so meeting with it both installs fallback
        # bounds and implements "assume the error did not occur".
        return _unary_meet(out, x, rhs.lo, rhs.hi)

    def assume_cmp(
        self,
        value: DBM,
        op: str,
        lhs: Expr,
        rhs: Expr,
        resolve: Resolver,
        evaluate: Evaluator,
    ) -> Optional[DBM]:
        value = value.close()
        if value.empty:
            return value
        a = evaluate(lhs)
        b = evaluate(rhs)
        from .interval import interval_cmp

        verdict = interval_cmp(op, a, b)
        if verdict.empty or verdict == singleton(0):
            return DBM.bottom(value.vars)
        if op == "==":
            first = self.assume_cmp(value, "<=", lhs, rhs, resolve, evaluate)
            return self.assume_cmp(first, ">=", lhs, rhs, resolve, evaluate)
        if op in (">", ">="):
            flipped = "<" if op == ">" else "<="
            return self.assume_cmp(value, flipped, rhs, lhs, resolve, evaluate)
        if op == "!=":
            return _assume_neq(value, lhs, rhs, resolve, a, b)
        # op is < or <=; encode lhs - rhs <= c as a difference or unary
        # constraint when both sides are var +/- const shapes.
        slack = -1 if op == "<" else 0
        lf = _as_var_plus_const(lhs, resolve)
        rf = _as_var_plus_const(rhs, resolve)
        out = value
        if lf is not None and rf is not None and lf[0] != rf[0]:
            if lf[0] in value.vars and rf[0] in value.vars:
                c = rf[1] - lf[1] + slack
                out = _add_edge(out, out.index(lf[0]), out.index(rf[0]), c)
        if lf is not None and lf[0] in out.vars and not out.empty:
            # lhs <= hi(rhs) + slack
            hi = ext_add(b.hi, slack - lf[1]) if b.hi is not PINF else PINF
            out = _unary_meet(out, out.index(lf[0]), MINF, hi)
        if rf is not None and rf[0] in out.vars and not out.empty:
            # rhs >= lo(lhs) - slack
            lo = ext_add(a.lo, -slack - rf[1]) if a.lo is not MINF else MINF
            out = _unary_meet(out, out.index(rf[0]), lo, PINF)
        return out

    def project(self, value: DBM, var: str) -> Interval:
        value = value.close()
        if value.empty:
            return BOTTOM
        x = value.index(var)
        return mk(ext_neg(value.m[0][x]), value.m[x][0])

    def constraints_for(
        self, value: DBM, var: str, display: Callable[[str], Optional[str]]
    ) -> list[str]:
        value = value.close()
        if value.empty or var not in value.vars:
            return []
        x = value.index(var)
        xname = display(var)
        lines: list[str] = []
        for other in value.vars:
            if other == var:
                continue
            oname = display(other)
            if oname is None:
                continue
            y = value.index(other)
            for (i, j, a, b) in ((x, y, xname, oname), (y, x, oname, xname)):
                c = value.m[i][j]
                if c is PINF:
                    continue
                implied = ext_add(value.m[i][0], value.m[0][j])
                if ext_lt(c, implied):
                    lines.append(f"{a} - {b} ≤ {c}")
        return lines

    def render(self, value: DBM, scope: dict[str, str]) -> list[str]:
        value = value.close()
        if value.empty:
            return ["⊥ (unreachable)"]
        lines = [f"{name} ∈ {self.project(value, qual)!r}" for name, qual in scope.items()]
        back = {qual: name for name, qual in scope.items()}
        seen = set()
        for name, qual in scope.items():
            for line in self.constraints_for(value, qual, lambda q: back.get(q)):
                if line not in seen:
                    seen.add(line)
                    lines.append(line)
        return lines


# --- matrix edits (all expect a closed, non-empty input) -------------------


def _havoc(d: DBM, x: int) -> DBM:
    """Unconstrain variable x but keep its dimension; closure is
    preserved because remaining entries are a sub-closure."""
    n = len(d.vars) + 1
    w = [list(row) for row in d.m]
    for i in range(n):
        w[i][x] = PINF
        w[x][i] = PINF
    w[x][x] = 0
    return DBM(d.vars, _freeze(w), closed=True)


def _set_const(d: DBM, x: int, c: int) -> DBM:
    d = _havoc(d, x)
    n = len(d.vars) + 1
    w = [list(row) for row in d.m]
    w[x][0] = c
    w[0][x] = -c
    # Re-tighten the new row/col through v0; other paths cannot improve.
    for i in range(n):
        if i == x:
            continue
        w[i][x] = ext_add(w[i][0], -c) if w[i][0] is not PINF else PINF
        w[x][i] = ext_add(w[0][i], c) if w[0][i] is not PINF else PINF
    return DBM(d.vars, _freeze(w), closed=True)


def _copy_shift(d: DBM, x: int, y: int, c: int) -> DBM:
    """x := y + c for a distinct source variable y."""
    n = len(d.vars) + 1
    w = [list(row) for row in d.m]
    for q in range(n):
        if q == x:
            continue
        w[x][q] = ext_add(d.m[y][q], c) if d.m[y][q] is not PINF else PINF
        w[q][x] = ext_add(d.m[q][y], -c) if d.m[q][y] is not PINF else PINF
    w[x][x] = 0
    w[x][y] = c
    w[y][x] = -c
    return DBM(d.vars, _freeze(w), closed=True)


def _self_shift(d: DBM, x: int, c: int) -> DBM:
    """x := x + c shifts every bound involving x."""
    n = len(d.vars) + 1
    w = [list(row) for row in d.m]
    for q in range(n):
        if q == x:
            continue
        w[x][q] = ext_add(d.m[x][q], c) if d.m[x][q] is not PINF else PINF
        w[q][x] = ext_add(d.m[q][x], -c) if d.m[q][x] is not PINF else PINF
    return DBM(d.vars, _freeze(w), closed=True)


def _unary_meet(d: DBM, x: int, lo: Ext, hi: Ext) -> DBM:
    if d.empty:
        return d
    tightened = False
    w = [list(row) for row in d.m]
    if hi is not PINF and ext_lt(hi, w[x][0]):
        w[x][0] = hi
        tightened = True
    if lo is not MINF and ext_lt(ext_neg(lo), w[0][x]):
        w[0][x] = ext_neg(lo)
        tightened = True
    if not tightened:
        return d
    return DBM(d.vars, _freeze(w), closed=False).close()


def _add_edge(d: DBM, i: int, j: int, c: int) -> DBM:
    """Add vi - vj <= c with incremental closure."""
    if d.empty or ext_le(d.m[i][j], c):
        return d
    n = len(d.vars) + 1
    w = [list(row) for row in d.m]
    w[i][j] = c
    for p in range(n):
        if w[p][i] is PINF:
            continue
        for q in range(n):
            if w[j][q] is PINF:
                continue
            via = ext_add(ext_add(w[p][i], c), w[j][q])
            if ext_lt(via, w[p][q]):
                w[p][q] = via
    for p in range(n):
        if ext_lt(w[p][p], 0):
            return DBM.bottom(d.vars)
        w[p][p] = 0
    return DBM(d.vars, _freeze(w), closed=True)


def _assume_neq(
    d: DBM, lhs: Expr, rhs: Expr, resolve: Resolver, a: Interval, b: Interval
) -> DBM:
    """x != c can only shave a boundary endpoint off a unary bound."""
    out = d
    for expr, own, other in ((lhs, a, b), (rhs, b, a)):
        if not isinstance(expr, Var) or not other.is_singleton() or out.empty:
            continue
        qual = resolve(expr.name)
        if qual not in out.vars:
            continue
        c = other.lo
        cur = interval_meet(own, ZoneDomain().project(out, qual))
        if cur.empty:
            continue
        if cur.lo == c and cur.hi == c:
            return DBM.bottom(out.vars)
        if cur.lo == c:
            out = _unary_meet(out, out.index(qual), c + 1, PINF)
        elif cur.hi == c:
            out = _unary_meet(out, out.index(qual), MINF, c - 1)
    return out


def _as_var_plus_const(expr: Expr, resolve: Resolver) -> Optional[tuple[str, int]]:
    """Match `y`, `y + c`, `c + y`, `y - c`; returns (qualified, c)."""
    if isinstance(expr, Var):
        return (resolve(expr.name), 0)
    if isinstance(expr, Binop) and expr.op in ("+", "-"):
        lhs, rhs = expr.lhs, expr.rhs
        if isinstance(lhs, Var) and isinstance(rhs, IntLit):
            c = rhs.value if expr.op == "+" else -rhs.value
            return (resolve(lhs.name), c)
        if expr.op == "+" and isinstance(lhs, IntLit) and isinstance(rhs, Var):
            return (resolve(rhs.name), lhs.value)
    return None
