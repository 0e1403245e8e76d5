"""Numeric abstract domains behind a unified signature.

Three domains are shipped: non-relational integer intervals, difference
bound matrices (zones), and their reduced product.  A fourth,
deliberately unsound clamping variant of intervals is kept for testing
the maintenance tooling and is never a sensible analysis choice.
"""

from .base import Domain
from .interval import (
    BOTTOM,
    TOP,
    Interval,
    IntervalDomain,
    IntervalEnv,
    ThresholdSet,
    interval_binop,
)
from .dbm import DBM, ZoneDomain
from .product import ProductDomain, ProductState
from .broken import BrokenIntervalDomain

__all__ = [
    "Domain",
    "Interval",
    "IntervalDomain",
    "IntervalEnv",
    "ThresholdSet",
    "interval_binop",
    "BOTTOM",
    "TOP",
    "DBM",
    "ZoneDomain",
    "ProductDomain",
    "ProductState",
    "BrokenIntervalDomain",
]
