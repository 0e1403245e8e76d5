"""Deliberately unsound interval variant, for exercising the
maintenance tooling only.

`broken-intervals` silently clamps every assigned value's upper bound
to 1000, so it happily "proves" overflow checks that honest domains
alarm on.  It exists so differential-configuration reduction has a
config-loadable unsoundness to hunt; never use it for real analyses.
"""

from __future__ import annotations

from typing import Optional

from ..ast import Expr
from .base import Resolver
from .interval import Interval, IntervalDomain, IntervalEnv, ext_lt, ext_min

_CLAMP = 1000


class BrokenIntervalDomain(IntervalDomain):
    name = "broken-intervals"

    def assign(
        self,
        value: IntervalEnv,
        var: str,
        expr: Expr,
        resolve: Resolver,
        rhs: Interval,
    ) -> Optional[IntervalEnv]:
        if not rhs.empty and ext_lt(_CLAMP, rhs.hi):
            rhs = Interval(ext_min(rhs.lo, _CLAMP), _CLAMP)  # unsound by design
        return super().assign(value, var, expr, resolve, rhs)
