"""Concrete MiniImp interpreter, the ground-truth oracle.

Executes a program with real integer semantics: every i32 arithmetic
operation checks its mathematical result against the i32 range before
storing, division and modulo check for a zero divisor, and `assert`
aborts on a false condition.  The error kinds and locations match the
abstract analyzer's check kinds and locations exactly, which is what
makes soundness testable: a concrete run may never fault at a location
the analysis reported all-safe for that kind.

Nondeterminism (`rand(lo, hi)`) and entry parameters are supplied by an
input resolver, so runs are deterministic given fixed inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Protocol

from .ast import (
    BUILTINS,
    I32_MAX,
    I32_MIN,
    Assert,
    Assign,
    Binop,
    Call,
    Decl,
    Expr,
    FuncDef,
    If,
    IntLit,
    Neg,
    Not,
    Print,
    Program,
    Rand,
    Return,
    SourceLoc,
    Stmt,
    Var,
    While,
)
from .parser import validate_program

# Error kind strings, shared (by value) with the analyzer's CheckKind.
OVERFLOW = "integer-overflow"
DIV_BY_ZERO = "division-by-zero"
MOD_BY_ZERO = "modulo-by-zero"
ASSERT_FAILURE = "assert-failure"

DEFAULT_STEP_BUDGET = 1_000_000
MAX_CALL_DEPTH = 512


class InputResolver(Protocol):
    def param(self, name: str) -> int: ...

    def rand(self, loc: SourceLoc, lo: int, hi: int) -> int: ...


@dataclass
class FixedInputs:
    """Resolver with a fixed parameter map and per-site rand values,
    keyed by the Rand expression's location."""

    params: dict[str, int] = field(default_factory=dict)
    rands: dict[tuple[str, int, int], int] = field(default_factory=dict)
    default_rand: Optional[int] = None

    def param(self, name: str) -> int:
        if name not in self.params:
            raise KeyError(f"no input value for entry parameter {name!r}")
        return self.params[name]

    def rand(self, loc: SourceLoc, lo: int, hi: int) -> int:
        value = self.rands.get(loc.key(), self.default_rand)
        if value is None:
            raise KeyError(f"no input value for rand at {loc}")
        if not (lo <= value <= hi):
            raise ValueError(f"input {value} for rand at {loc} outside [{lo}, {hi}]")
        return value


@dataclass
class ConcreteOutcome:
    status: str  # "ok" | "error" | "inconclusive"
    error_kind: Optional[str] = None
    error_loc: Optional[SourceLoc] = None
    env: dict[str, int] = field(default_factory=dict)
    prints: list[tuple[str, int]] = field(default_factory=list)
    steps: int = 0

    @property
    def ok(self) -> bool:
        return self.status == "ok"


class _Fault(Exception):
    def __init__(self, kind: str, loc: SourceLoc):
        self.kind = kind
        self.loc = loc


class _OutOfBudget(Exception):
    pass


class _ReturnSignal(Exception):
    def __init__(self, value: Optional[int]):
        self.value = value


def _trunc_div(a: int, b: int) -> int:
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b >= 0) else -q


def _trunc_mod(a: int, b: int) -> int:
    return a - _trunc_div(a, b) * b


class _Interp:
    def __init__(self, program: Program, inputs: InputResolver, step_budget: int):
        self.program = program
        self.inputs = inputs
        self.budget = step_budget
        self.steps = 0
        self.depth = 0
        self.prints: list[tuple[str, int]] = []

    def tick(self) -> None:
        self.steps += 1
        if self.steps > self.budget:
            raise _OutOfBudget()

    def check_i32(self, value: int, loc: SourceLoc) -> int:
        if not (I32_MIN <= value <= I32_MAX):
            raise _Fault(OVERFLOW, loc)
        return value

    def eval(self, expr: Expr, env: dict[str, int]) -> int:
        self.tick()
        if isinstance(expr, IntLit):
            return expr.value
        if isinstance(expr, Var):
            return env[expr.name]
        if isinstance(expr, Rand):
            return self.inputs.rand(expr.loc, expr.lo, expr.hi)
        if isinstance(expr, Neg):
            return self.check_i32(-self.eval(expr.operand, env), expr.loc)
        if isinstance(expr, Not):
            return 0 if self.eval(expr.operand, env) != 0 else 1
        if isinstance(expr, Binop):
            op = expr.op
            if op == "&&":
                if self.eval(expr.lhs, env) == 0:
                    return 0
                return 1 if self.eval(expr.rhs, env) != 0 else 0
            if op == "||":
                if self.eval(expr.lhs, env) != 0:
                    return 1
                return 1 if self.eval(expr.rhs, env) != 0 else 0
            a = self.eval(expr.lhs, env)
            b = self.eval(expr.rhs, env)
            if op == "<":
                return 1 if a < b else 0
            if op == "<=":
                return 1 if a <= b else 0
            if op == ">":
                return 1 if a > b else 0
            if op == ">=":
                return 1 if a >= b else 0
            if op == "==":
                return 1 if a == b else 0
            if op == "!=":
                return 1 if a != b else 0
            if op == "+":
                return self.check_i32(a + b, expr.loc)
            if op == "-":
                return self.check_i32(a - b, expr.loc)
            if op == "*":
                return self.check_i32(a * b, expr.loc)
            if op == "/":
                if b == 0:
                    raise _Fault(DIV_BY_ZERO, expr.loc)
                return self.check_i32(_trunc_div(a, b), expr.loc)
            if op == "%":
                if b == 0:
                    raise _Fault(MOD_BY_ZERO, expr.loc)
                return self.check_i32(_trunc_mod(a, b), expr.loc)
        raise TypeError(f"unknown expression node {type(expr).__name__}")

    def exec_block(self, body: list[Stmt], env: dict[str, int]) -> None:
        declared: list[str] = []
        try:
            for stmt in body:
                self.exec_stmt(stmt, env, declared)
        finally:
            for name in declared:
                env.pop(name, None)

    def exec_stmt(self, stmt: Stmt, env: dict[str, int], declared: list[str]) -> None:
        self.tick()
        if isinstance(stmt, Decl):
            env[stmt.name] = self.eval(stmt.init, env)
            declared.append(stmt.name)
        elif isinstance(stmt, Assign):
            env[stmt.name] = self.eval(stmt.expr, env)
        elif isinstance(stmt, If):
            if self.eval(stmt.cond, env) != 0:
                self.exec_block(stmt.then_body, env)
            else:
                self.exec_block(stmt.else_body, env)
        elif isinstance(stmt, While):
            while self.eval(stmt.cond, env) != 0:
                self.exec_block(stmt.body, env)
        elif isinstance(stmt, Assert):
            if self.eval(stmt.cond, env) == 0:
                raise _Fault(ASSERT_FAILURE, stmt.loc)
        elif isinstance(stmt, Call):
            if stmt.name in BUILTINS:
                for arg in stmt.args:  # arguments still evaluate
                    self.eval(arg, env)
                return
            args = [self.eval(arg, env) for arg in stmt.args]
            result = self.call(self.program.function(stmt.name), args)
            if stmt.target is not None:
                env[stmt.target] = result if result is not None else 0
        elif isinstance(stmt, Return):
            value = None if stmt.expr is None else self.eval(stmt.expr, env)
            raise _ReturnSignal(value)
        elif isinstance(stmt, Print):
            self.prints.append((stmt.name, env[stmt.name]))
        else:
            raise TypeError(f"unknown statement node {type(stmt).__name__}")

    def call(self, fn: FuncDef, args: list[int]) -> Optional[int]:
        self.depth += 1
        if self.depth > MAX_CALL_DEPTH:
            raise _OutOfBudget()
        env = dict(zip(fn.params, args))
        try:
            self.exec_block(fn.body, env)
        except _ReturnSignal as ret:
            if fn.returns_value:
                return ret.value if ret.value is not None else 0
            return None
        finally:
            self.depth -= 1
        return 0 if fn.returns_value else None


def interpret_concrete(
    program: Program,
    inputs: InputResolver,
    step_budget: int = DEFAULT_STEP_BUDGET,
) -> ConcreteOutcome:
    """Run the program to completion under the given inputs.

    Returns the final values of the entry function's variables on
    normal termination, the fault kind and location on a runtime error,
    or an inconclusive outcome when the step budget (or call depth cap)
    is exhausted; the latter is a property of the oracle, not of the
    program.
    """
    validate_program(program)
    entry = program.function(program.entry)
    interp = _Interp(program, inputs, step_budget)
    env: dict[str, int] = {}
    for p in entry.params:
        value = inputs.param(p)
        if not (I32_MIN <= value <= I32_MAX):
            raise ValueError(f"entry parameter {p}={value} outside i32")
        env[p] = value
    try:
        try:
            interp.exec_block(entry.body, env)
        except _ReturnSignal:
            pass
    except _Fault as fault:
        return ConcreteOutcome(
            "error",
            error_kind=fault.kind,
            error_loc=fault.loc,
            env=dict(env),
            prints=interp.prints,
            steps=interp.steps,
        )
    except _OutOfBudget:
        return ConcreteOutcome(
            "inconclusive", env=dict(env), prints=interp.prints, steps=interp.steps
        )
    return ConcreteOutcome("ok", env=dict(env), prints=interp.prints, steps=interp.steps)
