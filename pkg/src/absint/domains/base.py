"""Behavioral contract shared by all numeric domains.

A domain manipulates opaque environment values (one per program point)
mapping qualified variable names to abstract numeric information.  The
engine drives domains exclusively through this interface; hooks and the
debugger see even less (projections and renderings only).

Transfer methods may return None, meaning "not handled here": the
caller then falls through to the next domain in the configuration
order, which is how responsibilities are split without domains calling
each other directly.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from typing import Callable, Optional, Sequence, TYPE_CHECKING

if TYPE_CHECKING:
    from ..ast import Expr
    from .interval import Interval, ThresholdSet

# Resolves a source-level variable name to its qualified name in the
# current frame; evaluates an expression to an interval projection.
Resolver = Callable[[str], str]
Evaluator = Callable[["Expr"], "Interval"]


class Domain(ABC):
    name: str = "domain"

    # -- lattice structure --

    @abstractmethod
    def make_top(self, varnames: Sequence[str]) -> object: ...

    @abstractmethod
    def bottom_like(self, value: object) -> object: ...

    @abstractmethod
    def is_bottom(self, value: object) -> bool: ...

    @abstractmethod
    def join(self, a: object, b: object) -> object: ...

    @abstractmethod
    def meet(self, a: object, b: object) -> object: ...

    @abstractmethod
    def widen(self, a: object, b: object, thresholds: "ThresholdSet") -> object: ...

    @abstractmethod
    def leq(self, a: object, b: object) -> bool: ...

    def prepare(self, value: object) -> object:
        """Normalize a value for querying (e.g. close a DBM).  Widened
        loop heads are kept raw by the engine; transfers and
        projections run on prepared copies."""
        return value

    # -- scope management --

    @abstractmethod
    def declare(self, value: object, var: str, init: "Interval") -> object: ...

    @abstractmethod
    def forget(self, value: object, var: str) -> object: ...

    @abstractmethod
    def havoc(self, value: object, var: str, interval: "Interval") -> object:
        """Set `var` to exactly `interval`, dropping any relations but
        keeping the dimension (unlike forget + declare, which would
        reorder relational indices)."""

    @abstractmethod
    def refine(self, value: object, var: str, interval: "Interval") -> object:
        """Meet `var`'s abstract value with `interval`."""

    # -- transfer functions --

    @abstractmethod
    def assign(
        self,
        value: object,
        var: str,
        expr: "Expr",
        resolve: Resolver,
        rhs: "Interval",
    ) -> Optional[object]:
        """Assign `expr` (whose interval projection is `rhs`) to `var`.
        None means this domain does not handle the statement."""

    @abstractmethod
    def assume_cmp(
        self,
        value: object,
        op: str,
        lhs: "Expr",
        rhs: "Expr",
        resolve: Resolver,
        evaluate: Evaluator,
    ) -> Optional[object]:
        """Refine with an atomic comparison `lhs op rhs`.  None means
        not handled (the state is then kept as-is, which is sound)."""

    # -- queries --

    @abstractmethod
    def project(self, value: object, var: str) -> "Interval": ...

    def constraints_for(
        self, value: object, var: str, display: Callable[[str], Optional[str]]
    ) -> list[str]:
        """Relational constraints mentioning `var`, rendered with
        display names.  Non-relational domains have none."""
        return []

    @abstractmethod
    def render(self, value: object, scope: dict[str, str]) -> list[str]:
        """Human-readable state print; `scope` maps display names to
        qualified names."""
