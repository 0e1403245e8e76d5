"""Located AST for the MiniImp language.

MiniImp is a small C-like imperative language over 32-bit signed
integers.  It has functions, `int` variables, assignments, `if`/`while`
control flow, `assert`, `print`, a bounded nondeterministic input
expression `rand(lo, hi)`, and nothing else: no arrays, pointers,
strings or floats.  Surface `for` loops and postfix `++`/`--` exist
only as syntax and are desugared by the parser, so the AST defined here
is the complete statement vocabulary seen by every other component.

Expressions carry an integer type: `i32` in all source programs, `math`
(an unbounded mathematical integer) only on operations the analysis has
proved overflow-free and re-typed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Optional, Union

I32_MIN = -(2**31)
I32_MAX = 2**31 - 1


class IntType(Enum):
    I32 = "i32"
    MATH = "math"


@dataclass(frozen=True)
class SourceLoc:
    file: str
    line: int
    col: int

    def __post_init__(self) -> None:
        if not self.file:
            raise ValueError("SourceLoc.file must be nonempty")
        if self.line < 1 or self.col < 1:
            raise ValueError("SourceLoc line/col are 1-based")

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.col}"

    def key(self) -> tuple[str, int, int]:
        return (self.file, self.line, self.col)


# --- expressions ---------------------------------------------------------


class Expr:
    loc: SourceLoc


@dataclass
class IntLit(Expr):
    value: int
    ty: IntType
    loc: SourceLoc


@dataclass
class Var(Expr):
    name: str
    loc: SourceLoc


@dataclass
class Binop(Expr):
    op: str
    lhs: Expr
    rhs: Expr
    ty: IntType
    loc: SourceLoc


@dataclass
class Neg(Expr):
    operand: Expr
    ty: IntType
    loc: SourceLoc


@dataclass
class Not(Expr):
    operand: Expr
    loc: SourceLoc


@dataclass
class Rand(Expr):
    """Nondeterministic input drawn from [lo, hi], lo <= hi."""

    lo: int
    hi: int
    loc: SourceLoc


ARITH_OPS = ("+", "-", "*", "/", "%")
CMP_OPS = ("<", "<=", "==", "!=", ">", ">=")
LOGIC_OPS = ("&&", "||")


# --- statements ----------------------------------------------------------


class Stmt:
    loc: SourceLoc


@dataclass
class Decl(Stmt):
    name: str
    ty: IntType
    init: Expr
    loc: SourceLoc


@dataclass
class Assign(Stmt):
    name: str
    expr: Expr
    loc: SourceLoc


@dataclass
class If(Stmt):
    cond: Expr
    then_body: list[Stmt]
    else_body: list[Stmt]
    loc: SourceLoc


@dataclass
class While(Stmt):
    cond: Expr
    body: list[Stmt]
    loc: SourceLoc


@dataclass
class Assert(Stmt):
    cond: Expr
    loc: SourceLoc


@dataclass
class Call(Stmt):
    """Call statement; `target` holds the assigned variable for
    `x = f(...)` forms and is None for plain `f(...);` calls."""

    name: str
    args: list[Expr]
    target: Optional[str]
    loc: SourceLoc


@dataclass
class Return(Stmt):
    expr: Optional[Expr]
    loc: SourceLoc


@dataclass
class Print(Stmt):
    name: str
    loc: SourceLoc


@dataclass
class FuncDef:
    name: str
    params: list[str]  # every parameter is i32
    body: list[Stmt]
    returns_value: bool  # True for `int f(...)`, False for `void f(...)`
    loc: SourceLoc


@dataclass
class Program:
    functions: list[FuncDef]
    entry: str = "main"

    def function(self, name: str) -> Optional[FuncDef]:
        for fn in self.functions:
            if fn.name == name:
                return fn
        return None

    def has_entry(self) -> bool:
        return self.function(self.entry) is not None


# Builtins callable as statements; values are arities.  The single entry
# is a deliberate analyzer-crash trigger used by the reduction fixtures:
# its abstract transfer raises an internal error when the argument may
# be negative.  The concrete interpreter treats it as a no-op.
BUILTINS: dict[str, int] = {"__builtin_crash_if_mod_by_negative": 1}


def stmt_kind(stmt: Stmt) -> str:
    return type(stmt).__name__.lower()


TRANSFER_KINDS = ("decl", "assign", "if", "while", "assert", "call", "return", "print")


# --- traversal -----------------------------------------------------------


def iter_stmts(body: list[Stmt]) -> Iterator[Stmt]:
    """Yield every statement in `body`, including nested ones, in
    source order."""
    for stmt in body:
        yield stmt
        if isinstance(stmt, If):
            yield from iter_stmts(stmt.then_body)
            yield from iter_stmts(stmt.else_body)
        elif isinstance(stmt, While):
            yield from iter_stmts(stmt.body)


def iter_exprs(expr: Expr) -> Iterator[Expr]:
    yield expr
    if isinstance(expr, Binop):
        yield from iter_exprs(expr.lhs)
        yield from iter_exprs(expr.rhs)
    elif isinstance(expr, (Neg, Not)):
        yield from iter_exprs(expr.operand)


def stmt_exprs(stmt: Stmt) -> Iterator[Expr]:
    if isinstance(stmt, Decl):
        yield from iter_exprs(stmt.init)
    elif isinstance(stmt, Assign):
        yield from iter_exprs(stmt.expr)
    elif isinstance(stmt, (If, While, Assert)):
        yield from iter_exprs(stmt.cond)
    elif isinstance(stmt, Call):
        for arg in stmt.args:
            yield from iter_exprs(arg)
    elif isinstance(stmt, Return) and stmt.expr is not None:
        yield from iter_exprs(stmt.expr)


# --- pretty printing ------------------------------------------------------

_PREC = {
    "||": 1,
    "&&": 2,
    "<": 3,
    "<=": 3,
    "==": 3,
    "!=": 3,
    ">": 3,
    ">=": 3,
    "+": 4,
    "-": 4,
    "*": 5,
    "/": 5,
    "%": 5,
}


def expr_str(expr: Expr, parent_prec: int = 0, right: bool = False) -> str:
    if isinstance(expr, IntLit):
        return str(expr.value)
    if isinstance(expr, Var):
        return expr.name
    if isinstance(expr, Rand):
        return f"rand({expr.lo}, {expr.hi})"
    if isinstance(expr, Neg):
        return f"-{expr_str(expr.operand, 6)}"
    if isinstance(expr, Not):
        return f"!{expr_str(expr.operand, 6)}"
    if isinstance(expr, Binop):
        prec = _PREC[expr.op]
        text = (
            f"{expr_str(expr.lhs, prec)} {expr.op} "
            f"{expr_str(expr.rhs, prec, right=True)}"
        )
        if prec < parent_prec or (prec == parent_prec and right):
            return f"({text})"
        return text
    raise TypeError(f"unknown expression node {type(expr).__name__}")


def _stmt_lines(stmt: Stmt, indent: int) -> list[str]:
    pad = "  " * indent
    if isinstance(stmt, Decl):
        return [f"{pad}int {stmt.name} = {expr_str(stmt.init)};"]
    if isinstance(stmt, Assign):
        return [f"{pad}{stmt.name} = {expr_str(stmt.expr)};"]
    if isinstance(stmt, If):
        lines = [f"{pad}if ({expr_str(stmt.cond)}) {{"]
        for s in stmt.then_body:
            lines.extend(_stmt_lines(s, indent + 1))
        if stmt.else_body:
            lines.append(f"{pad}}} else {{")
            for s in stmt.else_body:
                lines.extend(_stmt_lines(s, indent + 1))
        lines.append(f"{pad}}}")
        return lines
    if isinstance(stmt, While):
        lines = [f"{pad}while ({expr_str(stmt.cond)}) {{"]
        for s in stmt.body:
            lines.extend(_stmt_lines(s, indent + 1))
        lines.append(f"{pad}}}")
        return lines
    if isinstance(stmt, Assert):
        return [f"{pad}assert({expr_str(stmt.cond)});"]
    if isinstance(stmt, Call):
        args = ", ".join(expr_str(a) for a in stmt.args)
        if stmt.target is not None:
            return [f"{pad}{stmt.target} = {stmt.name}({args});"]
        return [f"{pad}{stmt.name}({args});"]
    if isinstance(stmt, Return):
        if stmt.expr is None:
            return [f"{pad}return;"]
        return [f"{pad}return {expr_str(stmt.expr)};"]
    if isinstance(stmt, Print):
        return [f"{pad}print({stmt.name});"]
    raise TypeError(f"unknown statement node {type(stmt).__name__}")


def pretty(program: Program) -> str:
    """Render a program back to MiniImp source.  Re-parsing the output
    yields a structurally identical AST (locations aside)."""
    chunks: list[str] = []
    for fn in program.functions:
        ret = "int" if fn.returns_value else "void"
        params = ", ".join(f"int {p}" for p in fn.params)
        lines = [f"{ret} {fn.name}({params}) {{"]
        for s in fn.body:
            lines.extend(_stmt_lines(s, 1))
        lines.append("}")
        chunks.append("\n".join(lines))
    return "\n\n".join(chunks) + ("\n" if chunks else "")


# --- structural equality (ignores locations) ------------------------------


def _shape(node) -> object:
    if isinstance(node, Program):
        return ("program", node.entry, tuple(_shape(f) for f in node.functions))
    if isinstance(node, FuncDef):
        return (
            "func",
            node.name,
            tuple(node.params),
            node.returns_value,
            tuple(_shape(s) for s in node.body),
        )
    if isinstance(node, Decl):
        return ("decl", node.name, node.ty.value, _shape(node.init))
    if isinstance(node, Assign):
        return ("assign", node.name, _shape(node.expr))
    if isinstance(node, If):
        return (
            "if",
            _shape(node.cond),
            tuple(_shape(s) for s in node.then_body),
            tuple(_shape(s) for s in node.else_body),
        )
    if isinstance(node, While):
        return ("while", _shape(node.cond), tuple(_shape(s) for s in node.body))
    if isinstance(node, Assert):
        return ("assert", _shape(node.cond))
    if isinstance(node, Call):
        return ("call", node.name, node.target, tuple(_shape(a) for a in node.args))
    if isinstance(node, Return):
        return ("return", None if node.expr is None else _shape(node.expr))
    if isinstance(node, Print):
        return ("print", node.name)
    if isinstance(node, IntLit):
        return ("lit", node.value, node.ty.value)
    if isinstance(node, Var):
        return ("var", node.name)
    if isinstance(node, Binop):
        return ("binop", node.op, _shape(node.lhs), _shape(node.rhs), node.ty.value)
    if isinstance(node, Neg):
        return ("neg", _shape(node.operand))
    if isinstance(node, Not):
        return ("not", _shape(node.operand))
    if isinstance(node, Rand):
        return ("rand", node.lo, node.hi)
    raise TypeError(f"unknown node {type(node).__name__}")


def ast_equal(a, b) -> bool:
    """Structural equality modulo source locations."""
    return _shape(a) == _shape(b)
