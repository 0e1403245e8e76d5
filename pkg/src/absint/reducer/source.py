"""Source-level reduction for MiniImp programs.

Reduction walks a coarse-to-fine granularity schedule: whole top-level
functions, then statements (removing a statement removes its nested
body), then raw tokens.  Every candidate must re-parse before the
oracle is consulted; syntactically or scope-wise broken candidates are
rejected early without spawning the oracle, which is where most of the
schedule's speed comes from.

Between accepted passes the candidate only shrinks, and the final text
is 1-minimal at the finest granularity attempted (verified after the
fact, unit by unit).
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Callable, Optional

from ..ast import If, Program, Stmt, While, pretty
from ..lexer import ParseError, tokenize
from ..parser import parse
from .ddmin import NotInteresting, ddmin, verify_one_minimal

GRANULARITIES = ("functions", "statements", "tokens")


@dataclass
class PassRecord:
    granularity: str
    units_before: int
    units_after: int
    oracle_calls: int


@dataclass
class ReductionResult:
    final_text: str
    original_lines: int
    reduced_lines: int
    oracle_calls: int
    passes: list[PassRecord] = field(default_factory=list)
    one_minimal: bool = True

    @property
    def reduction_percent(self) -> float:
        if self.original_lines == 0:
            return 0.0
        return 100.0 * (1 - self.reduced_lines / self.original_lines)

    def table_row(self) -> str:
        return (
            f"{self.original_lines:>12} {self.reduced_lines:>11} "
            f"{self.reduction_percent:>9.2f}%"
        )


def _count_lines(text: str) -> int:
    return len([line for line in text.splitlines() if line.strip()])


def _parses(text: str, file: str) -> bool:
    try:
        parse(text, file)
        return True
    except ParseError:
        return False


# -- candidate builders per granularity --


def _function_units(program: Program) -> list[int]:
    return list(range(len(program.functions)))


def _build_function_subset(program: Program, subset: list[int]) -> str:
    keep = set(subset)
    return pretty(
        Program([fn for i, fn in enumerate(program.functions) if i in keep])
    )


def _statement_paths(program: Program) -> list[tuple]:
    """Paths identify statements positionally: (fn index, branch steps...)."""
    paths: list[tuple] = []

    def walk(body: list[Stmt], prefix: tuple) -> None:
        for i, stmt in enumerate(body):
            path = prefix + (i,)
            paths.append(path)
            if isinstance(stmt, If):
                walk(stmt.then_body, path + ("then",))
                walk(stmt.else_body, path + ("else",))
            elif isinstance(stmt, While):
                walk(stmt.body, path + ("body",))

    for fi, fn in enumerate(program.functions):
        walk(fn.body, (fi,))
    return paths


def _build_statement_subset(program: Program, subset: list[tuple]) -> str:
    keep = set(subset)

    def rebuild(body: list[Stmt], prefix: tuple) -> list[Stmt]:
        out = []
        for i, stmt in enumerate(body):
            path = prefix + (i,)
            if path not in keep:
                continue  # the whole subtree goes with it
            if isinstance(stmt, If):
                stmt = If(
                    stmt.cond,
                    rebuild(stmt.then_body, path + ("then",)),
                    rebuild(stmt.else_body, path + ("else",)),
                    stmt.loc,
                )
            elif isinstance(stmt, While):
                stmt = While(stmt.cond, rebuild(stmt.body, path + ("body",)), stmt.loc)
            out.append(stmt)
        return out

    functions = []
    for fi, fn in enumerate(program.functions):
        rebuilt = type(fn)(fn.name, fn.params, rebuild(fn.body, (fi,)), fn.returns_value, fn.loc)
        functions.append(rebuilt)
    return pretty(Program(functions))


def _token_units(text: str, file: str) -> list[int]:
    return list(range(len(tokenize(text, file)) - 1))  # exclude EOF


def _build_token_subset(tokens, subset: list[int]) -> str:
    keep = set(subset)
    parts: list[str] = []
    line = 1
    for i, tok in enumerate(tokens[:-1]):
        if i not in keep:
            continue
        if tok.loc.line > line:
            parts.append("\n" * (tok.loc.line - line))
            line = tok.loc.line
        parts.append(tok.text)
        parts.append(" ")
    return "".join(parts)


def reduce_source(
    path: str,
    oracle: Callable[[str], bool],
    granularities: tuple = GRANULARITIES,
    jobs: int = 1,
    log: Optional[Callable[[str], None]] = None,
) -> ReductionResult:
    """Shrink the file at `path` while `oracle(text)` stays true.

    The oracle receives candidate source text; parse-invalid candidates
    never reach it.  Raises NotInteresting if the original input does
    not satisfy the oracle.
    """
    with open(path, "r", encoding="utf-8") as fh:
        original = fh.read()
    file = os.path.basename(path)
    if not _parses(original, file):
        raise NotInteresting(f"{path} does not parse")

    calls = 0

    def counted(text: str) -> bool:
        nonlocal calls
        calls += 1
        return oracle(text)

    if not counted(original):
        raise NotInteresting("initial input not interesting")

    current = original
    passes: list[PassRecord] = []
    for granularity in granularities:
        before_calls = calls
        if granularity == "functions":
            program = parse(current, file)
            units = _function_units(program)
            build = lambda subset: _build_function_subset(program, subset)  # noqa: E731
        elif granularity == "statements":
            program = parse(current, file)
            units = _statement_paths(program)
            build = lambda subset: _build_statement_subset(program, subset)  # noqa: E731
        elif granularity == "tokens":
            tokens = tokenize(current, file)
            units = _token_units(current, file)
            build = lambda subset: _build_token_subset(tokens, subset)  # noqa: E731
        else:
            raise ValueError(f"unknown granularity {granularity!r}")

        def interesting(subset: list) -> bool:
            text = build(subset)
            if not _parses(text, file):
                return False  # rejected before the oracle spawns
            return counted(text)

        kept = ddmin(units, interesting, jobs=jobs)
        new_text = build(kept)
        if _parses(new_text, file) and counted(new_text):
            current = new_text
        if log:
            log(
                f"{granularity}: {len(units)} -> {len(kept)} units, "
                f"{calls - before_calls} oracle calls"
            )
        passes.append(PassRecord(granularity, len(units), len(kept), calls - before_calls))

    # 1-minimality of the final text at the finest granularity used
    final_gran = granularities[-1]
    if final_gran == "tokens":
        tokens = tokenize(current, file)
        units = _token_units(current, file)
        build = lambda subset: _build_token_subset(tokens, subset)  # noqa: E731
    elif final_gran == "statements":
        program = parse(current, file)
        units = _statement_paths(program)
        build = lambda subset: _build_statement_subset(program, subset)  # noqa: E731
    else:
        program = parse(current, file)
        units = _function_units(program)
        build = lambda subset: _build_function_subset(program, subset)  # noqa: E731

    def final_interesting(subset: list) -> bool:
        text = build(subset)
        return _parses(text, file) and counted(text)

    violations = verify_one_minimal(units, final_interesting)
    return ReductionResult(
        final_text=current,
        original_lines=_count_lines(original),
        reduced_lines=_count_lines(current),
        oracle_calls=calls,
        passes=passes,
        one_minimal=not violations,
    )
