"""Integer intervals with threshold widening, and the non-relational
environment domain built on them.

Endpoints are mathematical integers extended with two infinities, so
interval arithmetic never wraps; machine-range questions (does a result
fit i32?) are asked separately by the engine via `interval_binop`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

from ..ast import (
    I32_MAX,
    I32_MIN,
    Binop,
    Expr,
    IntLit,
    IntType,
    Neg,
    Not,
    Rand,
    Var,
)
from .base import Domain, Evaluator, Resolver


class _Inf:
    """Signed infinity endpoint; two singletons exist."""

    __slots__ = ("sign", "_symbol")

    def __init__(self, sign: int, symbol: str):
        self.sign = sign
        self._symbol = symbol

    def __repr__(self) -> str:
        return self._symbol

    def __deepcopy__(self, memo):  # preserve singleton identity
        return self


MINF = _Inf(-1, "-inf")
PINF = _Inf(+1, "+inf")

Ext = Union[int, _Inf]


def ext_le(a: Ext, b: Ext) -> bool:
    if a is MINF or b is PINF:
        return True
    if a is PINF:
        return b is PINF
    if b is MINF:
        return a is MINF
    return a <= b


def ext_lt(a: Ext, b: Ext) -> bool:
    return not ext_le(b, a)


def ext_min(a: Ext, b: Ext) -> Ext:
    return a if ext_le(a, b) else b


def ext_max(a: Ext, b: Ext) -> Ext:
    return b if ext_le(a, b) else a


def ext_neg(a: Ext) -> Ext:
    if a is MINF:
        return PINF
    if a is PINF:
        return MINF
    return -a


def ext_add(a: Ext, b: Ext) -> Ext:
    if isinstance(a, _Inf):
        assert not (isinstance(b, _Inf) and b.sign != a.sign), "-inf + +inf"
        return a
    if isinstance(b, _Inf):
        return b
    return a + b


def _ext_sign(a: Ext) -> int:
    if isinstance(a, _Inf):
        return a.sign
    return (a > 0) - (a < 0)


def ext_mul(a: Ext, b: Ext) -> Ext:
    if isinstance(a, _Inf) or isinstance(b, _Inf):
        s = _ext_sign(a) * _ext_sign(b)
        if s == 0:
            return 0
        return PINF if s > 0 else MINF
    return a * b


def _fmt(a: Ext) -> str:
    return repr(a) if isinstance(a, _Inf) else str(a)


@dataclass(frozen=True)
class Interval:
    lo: Ext = MINF
    hi: Ext = PINF
    empty: bool = False

    def __post_init__(self) -> None:
        if not self.empty and ext_lt(self.hi, self.lo):
            raise ValueError(f"malformed interval [{self.lo}, {self.hi}]")

    @property
    def is_bottom(self) -> bool:
        return self.empty

    def __repr__(self) -> str:
        if self.empty:
            return "⊥"
        return f"[{_fmt(self.lo)}, {_fmt(self.hi)}]"

    def contains(self, k: int) -> bool:
        return not self.empty and ext_le(self.lo, k) and ext_le(k, self.hi)

    def is_singleton(self) -> bool:
        return not self.empty and self.lo == self.hi

    def subset_i32(self) -> bool:
        return self.empty or (ext_le(I32_MIN, self.lo) and ext_le(self.hi, I32_MAX))


BOTTOM = Interval(0, 0, empty=True)
TOP = Interval()
I32_FULL = Interval(I32_MIN, I32_MAX)


def mk(lo: Ext, hi: Ext) -> Interval:
    if ext_lt(hi, lo):
        return BOTTOM
    return Interval(lo, hi)


def singleton(k: int) -> Interval:
    return Interval(k, k)


def interval_join(a: Interval, b: Interval) -> Interval:
    if a.empty:
        return b
    if b.empty:
        return a
    return Interval(ext_min(a.lo, b.lo), ext_max(a.hi, b.hi))


def interval_meet(a: Interval, b: Interval) -> Interval:
    if a.empty or b.empty:
        return BOTTOM
    return mk(ext_max(a.lo, b.lo), ext_min(a.hi, b.hi))


def interval_leq(a: Interval, b: Interval) -> bool:
    if a.empty:
        return True
    if b.empty:
        return False
    return ext_le(b.lo, a.lo) and ext_le(a.hi, b.hi)


@dataclass(frozen=True)
class ThresholdSet:
    """Sorted landmark constants for widening.  Always contains the i32
    range endpoints, so widened i32 bounds pause at the type range
    before escaping to infinity."""

    values: tuple[int, ...]

    @classmethod
    def default(cls) -> "ThresholdSet":
        return cls.of([I32_MIN, -1, 0, 1, I32_MAX])

    @classmethod
    def of(cls, values) -> "ThresholdSet":
        merged = set(values) | {I32_MIN, I32_MAX}
        return cls(tuple(sorted(merged)))

    def with_extra(self, values) -> "ThresholdSet":
        return ThresholdSet.of(set(self.values) | set(values))

    def __len__(self) -> int:
        return len(self.values)

    def largest_leq(self, x: Ext) -> Ext:
        """Largest threshold <= x, or -inf when none exists."""
        if x is PINF:
            return self.values[-1]
        if x is MINF:
            return MINF
        best: Ext = MINF
        for t in self.values:
            if t <= x:
                best = t
            else:
                break
        return best

    def smallest_geq(self, x: Ext) -> Ext:
        """Smallest threshold >= x, or +inf when none exists."""
        if x is MINF:
            return self.values[0]
        if x is PINF:
            return PINF
        for t in self.values:
            if t >= x:
                return t
        return PINF


def interval_widen(a: Interval, b: Interval, thresholds: ThresholdSet) -> Interval:
    if a.empty:
        return b
    if b.empty:
        return a
    lo = a.lo if ext_le(a.lo, b.lo) else thresholds.largest_leq(b.lo)
    hi = a.hi if ext_le(b.hi, a.hi) else thresholds.smallest_geq(b.hi)
    return Interval(lo, hi)


# --- arithmetic -------------------------------------------------------------


def interval_add(a: Interval, b: Interval) -> Interval:
    if a.empty or b.empty:
        return BOTTOM
    return Interval(ext_add(a.lo, b.lo), ext_add(a.hi, b.hi))


def interval_sub(a: Interval, b: Interval) -> Interval:
    if a.empty or b.empty:
        return BOTTOM
    return Interval(ext_add(a.lo, ext_neg(b.hi)), ext_add(a.hi, ext_neg(b.lo)))


def interval_neg(a: Interval) -> Interval:
    if a.empty:
        return BOTTOM
    return Interval(ext_neg(a.hi), ext_neg(a.lo))


def interval_mul(a: Interval, b: Interval) -> Interval:
    if a.empty or b.empty:
        return BOTTOM
    products = [
        ext_mul(a.lo, b.lo),
        ext_mul(a.lo, b.hi),
        ext_mul(a.hi, b.lo),
        ext_mul(a.hi, b.hi),
    ]
    lo, hi = products[0], products[0]
    for p in products[1:]:
        lo = ext_min(lo, p)
        hi = ext_max(hi, p)
    return Interval(lo, hi)


def _trunc_div_ext(a: Ext, b: Ext) -> Ext:
    """C-style truncated division on extended ints; b is finite nonzero
    or infinite."""
    if isinstance(b, _Inf):
        return 0  # |a / inf| -> 0 in the limit
    if isinstance(a, _Inf):
        return a if b > 0 else ext_neg(a)
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b >= 0) else -q


def without_zero(b: Interval) -> Interval:
    """Remove 0 when it sits on a boundary; an interior zero is not
    representable as removed, so the interval is returned unchanged."""
    if b.empty:
        return BOTTOM
    if b.lo == 0 and b.hi == 0:
        return BOTTOM
    if b.lo == 0:
        return Interval(1, b.hi)
    if b.hi == 0:
        return Interval(b.lo, -1)
    return b


def _div_fixed_sign(a: Interval, b: Interval) -> Interval:
    quotients = [
        _trunc_div_ext(a.lo, b.lo),
        _trunc_div_ext(a.lo, b.hi),
        _trunc_div_ext(a.hi, b.lo),
        _trunc_div_ext(a.hi, b.hi),
    ]
    lo, hi = quotients[0], quotients[0]
    for q in quotients[1:]:
        lo = ext_min(lo, q)
        hi = ext_max(hi, q)
    return Interval(lo, hi)


def interval_div(a: Interval, b: Interval) -> Interval:
    """Quotient range for truncated division; 0 must already have been
    removed from b (the caller records the division check)."""
    if a.empty or b.empty:
        return BOTTOM
    result = BOTTOM
    pos = interval_meet(b, Interval(1, PINF))
    if not pos.empty:
        result = interval_join(result, _div_fixed_sign(a, pos))
    neg = interval_meet(b, Interval(MINF, -1))
    if not neg.empty:
        result = interval_join(result, _div_fixed_sign(a, neg))
    return result


def interval_mod(a: Interval, b: Interval) -> Interval:
    """Remainder range for truncated division (sign follows the
    dividend); 0 must already have been removed from b."""
    if a.empty or b.empty:
        return BOTTOM
    # Largest possible |divisor| bounds |remainder| by m - 1.
    mags: list[Ext] = []
    for e in (b.lo, b.hi):
        mags.append(PINF if isinstance(e, _Inf) else abs(e))
    m = ext_max(mags[0], mags[1])
    bound = PINF if isinstance(m, _Inf) else m - 1
    lo: Ext = ext_neg(bound)
    hi: Ext = bound
    if ext_le(0, a.lo):
        lo = 0
    if ext_le(a.hi, 0):
        hi = 0
    # |remainder| never exceeds |dividend|.
    amag = ext_max(
        PINF if isinstance(a.lo, _Inf) else abs(a.lo),
        PINF if isinstance(a.hi, _Inf) else abs(a.hi),
    )
    lo = ext_max(lo, ext_neg(amag))
    hi = ext_min(hi, amag)
    # Exact when the dividend cannot reach the divisor's magnitude.
    minabs: Ext = 1
    if ext_le(1, b.lo):
        minabs = b.lo
    elif ext_le(b.hi, -1):
        minabs = ext_neg(b.hi)
    if not isinstance(minabs, _Inf):
        if ext_le(0, a.lo) and ext_lt(a.hi, minabs):
            return a
        if ext_le(a.hi, 0) and ext_lt(ext_neg(minabs), a.lo):
            return a
    return mk(lo, hi)


def _truthiness(v: Interval) -> Interval:
    """Three-valued boolean of an integer value: 0 is false, anything
    else is true."""
    if v.empty:
        return BOTTOM
    if v.lo == 0 and v.hi == 0:
        return singleton(0)
    if not v.contains(0):
        return singleton(1)
    return Interval(0, 1)


def interval_cmp(op: str, a: Interval, b: Interval) -> Interval:
    if a.empty or b.empty:
        return BOTTOM
    if op == ">":
        return interval_cmp("<", b, a)
    if op == ">=":
        return interval_cmp("<=", b, a)
    if op == "<":
        if ext_lt(a.hi, b.lo):
            return singleton(1)
        if ext_le(b.hi, a.lo):
            return singleton(0)
        return Interval(0, 1)
    if op == "<=":
        if ext_le(a.hi, b.lo):
            return singleton(1)
        if ext_lt(b.hi, a.lo):
            return singleton(0)
        return Interval(0, 1)
    if op == "==":
        if a.is_singleton() and b.is_singleton() and a.lo == b.lo:
            return singleton(1)
        if interval_meet(a, b).empty:
            return singleton(0)
        return Interval(0, 1)
    if op == "!=":
        r = interval_cmp("==", a, b)
        if r.is_singleton():
            return singleton(1 - r.lo)
        return r
    raise ValueError(f"not a comparison operator: {op}")


def interval_logic(op: str, a: Interval, b: Interval) -> Interval:
    ta, tb = _truthiness(a), _truthiness(b)
    if ta.empty or tb.empty:
        return BOTTOM
    if op == "&&":
        if ta == singleton(0) or tb == singleton(0):
            return singleton(0)
        if ta == singleton(1) and tb == singleton(1):
            return singleton(1)
        return Interval(0, 1)
    if op == "||":
        if ta == singleton(1) or tb == singleton(1):
            return singleton(1)
        if ta == singleton(0) and tb == singleton(0):
            return singleton(0)
        return Interval(0, 1)
    raise ValueError(f"not a logic operator: {op}")


def interval_binop(
    op: str, a: Interval, b: Interval, ty: IntType
) -> tuple[Interval, bool, bool]:
    """Evaluate an arithmetic operator over mathematical integers.

    Returns (value, may_overflow, may_divide_by_zero).  The value is
    the unclamped mathematical range; may_overflow holds when the type
    is i32 and that range is not contained in the i32 range.  For / and
    % the divisor's zero is removed before computing the value.
    """
    may_dz = False
    if op in ("/", "%"):
        may_dz = b.contains(0)
        b = without_zero(b)
    if op == "+":
        value = interval_add(a, b)
    elif op == "-":
        value = interval_sub(a, b)
    elif op == "*":
        value = interval_mul(a, b)
    elif op == "/":
        value = interval_div(a, b)
    elif op == "%":
        value = interval_mod(a, b)
    else:
        raise ValueError(f"not an arithmetic operator: {op}")
    may_overflow = ty == IntType.I32 and not value.subset_i32()
    return value, may_overflow, may_dz


# --- environment domain -----------------------------------------------------


@dataclass(frozen=True)
class IntervalEnv:
    """Map from qualified variable names to intervals, plus a
    reachability flag; unreachable environments answer ⊥ everywhere."""

    vars: tuple[tuple[str, Interval], ...]
    reachable: bool = True

    @classmethod
    def top(cls, varnames: Sequence[str]) -> "IntervalEnv":
        return cls(tuple((v, TOP) for v in varnames))

    def as_dict(self) -> dict[str, Interval]:
        return dict(self.vars)

    def with_var(self, var: str, value: Interval) -> "IntervalEnv":
        if value.empty:
            return IntervalEnv(self.vars, reachable=False)
        items = dict(self.vars)
        items[var] = value
        return IntervalEnv(tuple(items.items()), self.reachable)

    def lookup(self, var: str) -> Interval:
        if not self.reachable:
            return BOTTOM
        return dict(self.vars)[var]


class IntervalDomain(Domain):
    name = "intervals"

    def make_top(self, varnames: Sequence[str]) -> IntervalEnv:
        return IntervalEnv.top(varnames)

    def bottom_like(self, value: IntervalEnv) -> IntervalEnv:
        return IntervalEnv(value.vars, reachable=False)

    def is_bottom(self, value: IntervalEnv) -> bool:
        return not value.reachable

    def join(self, a: IntervalEnv, b: IntervalEnv) -> IntervalEnv:
        if not a.reachable:
            return b
        if not b.reachable:
            return a
        db = b.as_dict()
        assert set(db) == {k for k, _ in a.vars}, "join over mismatched scopes"
        return IntervalEnv(tuple((k, interval_join(v, db[k])) for k, v in a.vars))

    def meet(self, a: IntervalEnv, b: IntervalEnv) -> IntervalEnv:
        if not a.reachable or not b.reachable:
            return self.bottom_like(a)
        db = b.as_dict()
        out = []
        for k, v in a.vars:
            m = interval_meet(v, db[k])
            if m.empty:
                return self.bottom_like(a)
            out.append((k, m))
        return IntervalEnv(tuple(out))

    def widen(self, a: IntervalEnv, b: IntervalEnv, thresholds: ThresholdSet) -> IntervalEnv:
        if not a.reachable:
            return b
        if not b.reachable:
            return a
        db = b.as_dict()
        return IntervalEnv(
            tuple((k, interval_widen(v, db[k], thresholds)) for k, v in a.vars)
        )

    def leq(self, a: IntervalEnv, b: IntervalEnv) -> bool:
        if not a.reachable:
            return True
        if not b.reachable:
            return False
        db = b.as_dict()
        return all(interval_leq(v, db[k]) for k, v in a.vars)

    def declare(self, value: IntervalEnv, var: str, init: Interval) -> IntervalEnv:
        items = dict(value.vars)
        items[var] = init
        env = IntervalEnv(tuple(items.items()), value.reachable)
        if init.empty:
            return self.bottom_like(env)
        return env

    def forget(self, value: IntervalEnv, var: str) -> IntervalEnv:
        items = dict(value.vars)
        items.pop(var, None)
        return IntervalEnv(tuple(items.items()), value.reachable)

    def havoc(self, value: IntervalEnv, var: str, interval: Interval) -> IntervalEnv:
        return value.with_var(var, interval)

    def refine(self, value: IntervalEnv, var: str, interval: Interval) -> IntervalEnv:
        if not value.reachable:
            return value
        return value.with_var(var, interval_meet(value.lookup(var), interval))

    def assign(
        self,
        value: IntervalEnv,
        var: str,
        expr: Expr,
        resolve: Resolver,
        rhs: Interval,
    ) -> Optional[IntervalEnv]:
        return value.with_var(var, rhs)

    def assume_cmp(
        self,
        value: IntervalEnv,
        op: str,
        lhs: Expr,
        rhs: Expr,
        resolve: Resolver,
        evaluate: Evaluator,
    ) -> Optional[IntervalEnv]:
        a = evaluate(lhs)
        b = evaluate(rhs)
        verdict = interval_cmp(op, a, b)
        if verdict.empty or verdict == singleton(0):
            return self.bottom_like(value)
        out = value
        if isinstance(lhs, Var):
            refined = interval_meet(a, _bound_left(op, b))
            out = out.with_var(resolve(lhs.name), _drop_endpoint(refined, op, b))
        if isinstance(rhs, Var) and out.reachable:
            flipped = _FLIP[op]
            refined = interval_meet(b, _bound_left(flipped, a))
            out = out.with_var(resolve(rhs.name), _drop_endpoint(refined, flipped, a))
        return out

    def project(self, value: IntervalEnv, var: str) -> Interval:
        return value.lookup(var)

    def render(self, value: IntervalEnv, scope: dict[str, str]) -> list[str]:
        if not value.reachable:
            return ["⊥ (unreachable)"]
        env = value.as_dict()
        return [f"{name} ∈ {env[qual]!r}" for name, qual in scope.items()]


_FLIP = {"<": ">", "<=": ">=", ">": "<", ">=": "<=", "==": "==", "!=": "!="}


def _bound_left(op: str, b: Interval) -> Interval:
    """Interval that the left side must lie in for `left op b` to be
    satisfiable."""
    if b.empty:
        return BOTTOM
    if op == "<":
        return mk(MINF, ext_add(b.hi, -1) if not isinstance(b.hi, _Inf) else PINF)
    if op == "<=":
        return Interval(MINF, b.hi)
    if op == ">":
        return mk(ext_add(b.lo, 1) if not isinstance(b.lo, _Inf) else MINF, PINF)
    if op == ">=":
        return Interval(b.lo, PINF)
    if op == "==":
        return b
    if op == "!=":
        return TOP
    raise ValueError(op)


def _drop_endpoint(refined: Interval, op: str, b: Interval) -> Interval:
    """For `x != c` with a constant c sitting on x's boundary, shave the
    endpoint off; other disequalities are not representable."""
    if op != "!=" or refined.empty or not b.is_singleton():
        return refined
    c = b.lo
    if refined.lo == c and refined.hi == c:
        return BOTTOM
    if refined.lo == c:
        return Interval(c + 1, refined.hi)
    if refined.hi == c:
        return Interval(refined.lo, c - 1)
    return refined
