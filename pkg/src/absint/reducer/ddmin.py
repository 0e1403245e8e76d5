"""Minimizing delta debugging (ddmin).

Given a list of units and an interestingness predicate that holds for
the full list, ddmin repeatedly splits the current candidate into n
chunks and tests each complement, keeping the first interesting one (in
index order) and refining the granularity when none is.  It terminates
with a 1-minimal subset: removing any single remaining unit makes the
predicate false.

Complement probes within one round are independent, so they may run in
parallel; the accept rule (lowest interesting index wins) keeps the
result identical to the sequential schedule.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Optional, Sequence, TypeVar

T = TypeVar("T")


class NotInteresting(Exception):
    """The initial input already fails the oracle; nothing to reduce."""


def _split(items: list[T], n: int) -> list[list[T]]:
    chunks = []
    start = 0
    for i in range(n):
        end = start + (len(items) - start) // (n - i)
        chunks.append(items[start:end])
        start = end
    return [c for c in chunks if c]


class _CachedOracle:
    def __init__(self, test: Callable[[list[T]], bool]):
        self.test = test
        self.calls = 0
        self._cache: dict[frozenset, bool] = {}

    def __call__(self, subset: list[T]) -> bool:
        key = frozenset(subset)
        if key in self._cache:
            return self._cache[key]
        self.calls += 1
        result = bool(self.test(subset))
        self._cache[key] = result
        return result

    def peek(self, subset: list[T]) -> Optional[bool]:
        return self._cache.get(frozenset(subset))


def ddmin(
    units: Sequence[T],
    oracle: Callable[[list[T]], bool],
    jobs: int = 1,
) -> list[T]:
    """Return a 1-minimal interesting subset of `units`.

    Raises NotInteresting when the full list is not interesting.  With
    jobs > 1, the complements of each round are probed concurrently;
    results match the sequential algorithm exactly.
    """
    cached = _CachedOracle(oracle)
    current = list(units)
    if not cached(current):
        raise NotInteresting("initial input not interesting")
    if cached([]):
        return []

    n = 2
    while len(current) >= 2:
        chunks = _split(current, n)
        complements = []
        for i in range(len(chunks)):
            complement = [u for j, chunk in enumerate(chunks) for u in chunk if j != i]
            complements.append(complement)

        winner: Optional[int] = None
        if jobs > 1:
            unknown = [c for c in complements if cached.peek(c) is None]
            if unknown:
                with ThreadPoolExecutor(max_workers=jobs) as pool:
                    results = list(pool.map(cached.test, unknown))
                for c, r in zip(unknown, results):
                    cached._cache[frozenset(c)] = bool(r)
                    cached.calls += 1
            for i, complement in enumerate(complements):
                if cached(complement):
                    winner = i
                    break
        else:
            for i, complement in enumerate(complements):
                if cached(complement):
                    winner = i
                    break

        if winner is not None:
            current = complements[winner]
            n = max(n - 1, 2)
        else:
            if n >= len(current):
                break
            n = min(n * 2, len(current))

    assert cached(current), "ddmin invariant: result satisfies the oracle"
    return current


def verify_one_minimal(
    result: Sequence[T], oracle: Callable[[list[T]], bool]
) -> list[T]:
    """Return the units whose individual removal keeps the oracle
    interesting; empty means the result is 1-minimal."""
    violations = []
    items = list(result)
    for i in range(len(items)):
        if oracle(items[:i] + items[i + 1 :]):
            violations.append(items[i])
    return violations
