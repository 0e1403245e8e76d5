"""Automated testcase reduction."""

from .ddmin import NotInteresting, ddmin
from .source import GRANULARITIES, ReductionResult, reduce_source
from .oracles import Oracle, make_crash_oracle, make_differential_oracle

__all__ = [
    "GRANULARITIES",
    "NotInteresting",
    "Oracle",
    "ReductionResult",
    "ddmin",
    "make_crash_oracle",
    "make_differential_oracle",
    "reduce_source",
]
