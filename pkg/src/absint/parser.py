"""Recursive-descent parser for MiniImp.

Produces the desugared AST: `for` loops become Decl/Assign + While,
postfix `++`/`--` become ordinary assignments, `int x = f(...)` becomes
a Decl followed by a Call with a result target, and unary minus on
integer literals is folded into the literal so that `int y = -1;` is a
plain constant and emits no arithmetic check later.

The parser also runs a scope check (every variable declared before use,
no redeclaration in an enclosing live scope) so the rest of the system
can assume well-scoped programs.
"""

from __future__ import annotations

from typing import Optional

from .ast import (
    ARITH_OPS,
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
    IntType,
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
from .lexer import ParseError, Token, tokenize


class ProgramError(Exception):
    """Semantic error raised when a whole program is validated (missing
    entry point, unresolved call target, arity or return-type misuse)."""

    def __init__(self, message: str, loc: Optional[SourceLoc] = None):
        super().__init__(f"{loc}: {message}" if loc else message)
        self.message = message
        self.loc = loc


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    # -- token plumbing --

    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def at(self, kind: str, text: Optional[str] = None) -> bool:
        tok = self.peek()
        return tok.kind == kind and (text is None or tok.text == text)

    def expect(self, kind: str, text: Optional[str] = None) -> Token:
        tok = self.peek()
        if not self.at(kind, text):
            want = text if text is not None else kind
            got = tok.text if tok.text else tok.kind
            raise ParseError(f"expected {want!r}, found {got!r}", tok.loc)
        return self.next()

    # -- grammar --

    def program(self, file: str) -> Program:
        functions: list[FuncDef] = []
        while not self.at("eof"):
            functions.append(self.fundef())
        return Program(functions)

    def fundef(self) -> FuncDef:
        tok = self.peek()
        if self.at("kw", "int") or self.at("kw", "void"):
            returns_value = self.next().text == "int"
        else:
            raise ParseError(
                f"expected 'int' or 'void' at top level, found {tok.text!r}", tok.loc
            )
        name = self.expect("ident").text
        self.expect("op", "(")
        params: list[str] = []
        if not self.at("op", ")"):
            while True:
                self.expect("kw", "int")
                params.append(self.expect("ident").text)
                if self.at("op", ","):
                    self.next()
                    continue
                break
        self.expect("op", ")")
        body = self.block()
        return FuncDef(name, params, body, returns_value, tok.loc)

    def block(self) -> list[Stmt]:
        self.expect("op", "{")
        stmts: list[Stmt] = []
        while not self.at("op", "}"):
            if self.at("eof"):
                raise ParseError("unexpected end of input, expected '}'", self.peek().loc)
            stmts.extend(self.statement())
        self.expect("op", "}")
        return stmts

    def body(self) -> list[Stmt]:
        """Either a braced block or a single statement."""
        if self.at("op", "{"):
            return self.block()
        return self.statement()

    def statement(self) -> list[Stmt]:
        tok = self.peek()
        if self.at("kw", "int"):
            stmts = self.declaration()
            self.expect("op", ";")
            return stmts
        if self.at("kw", "if"):
            return [self.if_stmt()]
        if self.at("kw", "while"):
            return [self.while_stmt()]
        if self.at("kw", "for"):
            return self.for_stmt()
        if self.at("kw", "assert"):
            self.next()
            self.expect("op", "(")
            cond = self.expression()
            self.expect("op", ")")
            self.expect("op", ";")
            return [Assert(cond, tok.loc)]
        if self.at("kw", "return"):
            self.next()
            expr = None if self.at("op", ";") else self.expression()
            self.expect("op", ";")
            return [Return(expr, tok.loc)]
        if self.at("kw", "print"):
            self.next()
            self.expect("op", "(")
            name = self.expect("ident").text
            self.expect("op", ")")
            self.expect("op", ";")
            return [Print(name, tok.loc)]
        if self.at("ident"):
            stmts = self.simple_stmt()
            self.expect("op", ";")
            return stmts
        raise ParseError(f"expected a statement, found {tok.text or tok.kind!r}", tok.loc)

    def declaration(self) -> list[Stmt]:
        """`int x = expr` or `int x = f(args)`, semicolon not consumed."""
        kw = self.expect("kw", "int")
        name = self.expect("ident").text
        self.expect("op", "=")
        if self.at("ident") and self.peek(1).kind == "op" and self.peek(1).text == "(":
            call = self.call_tail(self.next(), target=name)
            zero = IntLit(0, IntType.I32, kw.loc)
            return [Decl(name, IntType.I32, zero, kw.loc), call]
        init = self.expression()
        return [Decl(name, IntType.I32, init, kw.loc)]

    def simple_stmt(self) -> list[Stmt]:
        """Assignment, increment/decrement, or call; semicolon not consumed."""
        ident = self.expect("ident")
        if self.at("op", "("):
            return [self.call_tail(ident, target=None)]
        if self.at("op", "++") or self.at("op", "--"):
            op = self.next()
            delta = Binop(
                "+" if op.text == "++" else "-",
                Var(ident.text, ident.loc),
                IntLit(1, IntType.I32, op.loc),
                IntType.I32,
                ident.loc,
            )
            return [Assign(ident.text, delta, ident.loc)]
        self.expect("op", "=")
        if self.at("ident") and self.peek(1).kind == "op" and self.peek(1).text == "(":
            return [self.call_tail(self.next(), target=ident.text)]
        expr = self.expression()
        return [Assign(ident.text, expr, ident.loc)]

    def call_tail(self, callee: Token, target: Optional[str]) -> Call:
        self.expect("op", "(")
        args: list[Expr] = []
        if not self.at("op", ")"):
            while True:
                args.append(self.expression())
                if self.at("op", ","):
                    self.next()
                    continue
                break
        self.expect("op", ")")
        return Call(callee.text, args, target, callee.loc)

    def if_stmt(self) -> If:
        kw = self.expect("kw", "if")
        self.expect("op", "(")
        cond = self.expression()
        self.expect("op", ")")
        then_body = self.body()
        else_body: list[Stmt] = []
        if self.at("kw", "else"):
            self.next()
            else_body = self.body()
        return If(cond, then_body, else_body, kw.loc)

    def while_stmt(self) -> While:
        kw = self.expect("kw", "while")
        self.expect("op", "(")
        cond = self.expression()
        self.expect("op", ")")
        return While(cond, self.body(), kw.loc)

    def for_stmt(self) -> list[Stmt]:
        """`for (init; cond; step) body` desugars to `init; while (cond)
        { body; step; }`; any of the three headers may be empty."""
        kw = self.expect("kw", "for")
        self.expect("op", "(")
        init: list[Stmt] = []
        if not self.at("op", ";"):
            init = self.declaration() if self.at("kw", "int") else self.simple_stmt()
        self.expect("op", ";")
        if self.at("op", ";"):
            cond: Expr = IntLit(1, IntType.I32, kw.loc)
        else:
            cond = self.expression()
        self.expect("op", ";")
        step: list[Stmt] = [] if self.at("op", ")") else self.simple_stmt()
        self.expect("op", ")")
        body = self.body()
        return init + [While(cond, body + step, kw.loc)]

    # -- expressions, lowest precedence first --

    def expression(self) -> Expr:
        return self.or_expr()

    def or_expr(self) -> Expr:
        expr = self.and_expr()
        while self.at("op", "||"):
            loc = self.next().loc
            expr = Binop("||", expr, self.and_expr(), IntType.I32, loc)
        return expr

    def and_expr(self) -> Expr:
        expr = self.cmp_expr()
        while self.at("op", "&&"):
            loc = self.next().loc
            expr = Binop("&&", expr, self.cmp_expr(), IntType.I32, loc)
        return expr

    def cmp_expr(self) -> Expr:
        expr = self.add_expr()
        while self.peek().kind == "op" and self.peek().text in ("<", "<=", "==", "!=", ">", ">="):
            tok = self.next()
            expr = Binop(tok.text, expr, self.add_expr(), IntType.I32, tok.loc)
        return expr

    def add_expr(self) -> Expr:
        expr = self.mul_expr()
        while self.peek().kind == "op" and self.peek().text in ("+", "-"):
            tok = self.next()
            expr = Binop(tok.text, expr, self.mul_expr(), IntType.I32, tok.loc)
        return expr

    def mul_expr(self) -> Expr:
        expr = self.unary()
        while self.peek().kind == "op" and self.peek().text in ("*", "/", "%"):
            tok = self.next()
            expr = Binop(tok.text, expr, self.unary(), IntType.I32, tok.loc)
        return expr

    def unary(self) -> Expr:
        if self.at("op", "-"):
            tok = self.next()
            operand = self.unary()
            if isinstance(operand, IntLit):
                return self.int_lit(-operand.value, tok.loc)
            return Neg(operand, IntType.I32, tok.loc)
        if self.at("op", "!"):
            tok = self.next()
            return Not(self.unary(), tok.loc)
        return self.atom()

    def atom(self) -> Expr:
        tok = self.peek()
        if tok.kind == "int":
            self.next()
            return self.int_lit(int(tok.text), tok.loc)
        if self.at("kw", "rand"):
            self.next()
            self.expect("op", "(")
            lo = self.signed_int()
            self.expect("op", ",")
            hi = self.signed_int()
            self.expect("op", ")")
            if lo > hi:
                raise ParseError(f"rand range [{lo}, {hi}] is empty", tok.loc)
            return Rand(lo, hi, tok.loc)
        if tok.kind == "ident":
            self.next()
            return Var(tok.text, tok.loc)
        if self.at("op", "("):
            self.next()
            expr = self.expression()
            self.expect("op", ")")
            return expr
        raise ParseError(f"expected an expression, found {tok.text or tok.kind!r}", tok.loc)

    def signed_int(self) -> int:
        sign = 1
        while self.at("op", "-"):
            self.next()
            sign = -sign
        tok = self.expect("int")
        value = sign * int(tok.text)
        if not (I32_MIN <= value <= I32_MAX):
            raise ParseError(f"literal {value} does not fit i32", tok.loc)
        return value

    def int_lit(self, value: int, loc: SourceLoc) -> IntLit:
        if not (I32_MIN <= value <= I32_MAX):
            raise ParseError(f"literal {value} does not fit i32", loc)
        return IntLit(value, IntType.I32, loc)


# --- scope checking --------------------------------------------------------


def _check_scopes(fn: FuncDef) -> None:
    if len(set(fn.params)) != len(fn.params):
        raise ParseError(f"duplicate parameter name in {fn.name}", fn.loc)

    def use(name: str, loc: SourceLoc, scopes: list[set[str]]) -> None:
        if not any(name in s for s in scopes):
            raise ParseError(f"variable {name!r} used before declaration", loc)

    def check_expr(expr: Expr, scopes: list[set[str]]) -> None:
        if isinstance(expr, Var):
            use(expr.name, expr.loc, scopes)
        elif isinstance(expr, Binop):
            check_expr(expr.lhs, scopes)
            check_expr(expr.rhs, scopes)
        elif isinstance(expr, (Neg, Not)):
            check_expr(expr.operand, scopes)

    def check_block(body: list[Stmt], scopes: list[set[str]]) -> None:
        scopes.append(set())
        for stmt in body:
            if isinstance(stmt, Decl):
                check_expr(stmt.init, scopes)
                if any(stmt.name in s for s in scopes):
                    raise ParseError(f"redeclaration of {stmt.name!r}", stmt.loc)
                scopes[-1].add(stmt.name)
            elif isinstance(stmt, Assign):
                check_expr(stmt.expr, scopes)
                use(stmt.name, stmt.loc, scopes)
            elif isinstance(stmt, If):
                check_expr(stmt.cond, scopes)
                check_block(stmt.then_body, scopes)
                check_block(stmt.else_body, scopes)
            elif isinstance(stmt, While):
                check_expr(stmt.cond, scopes)
                check_block(stmt.body, scopes)
            elif isinstance(stmt, Assert):
                check_expr(stmt.cond, scopes)
            elif isinstance(stmt, Call):
                for arg in stmt.args:
                    check_expr(arg, scopes)
                if stmt.target is not None:
                    use(stmt.target, stmt.loc, scopes)
            elif isinstance(stmt, Return) and stmt.expr is not None:
                check_expr(stmt.expr, scopes)
            elif isinstance(stmt, Print):
                use(stmt.name, stmt.loc, scopes)
        scopes.pop()

    check_block(fn.body, [set(fn.params)])


def parse(source: str, file: str) -> Program:
    """Parse MiniImp source into a desugared, scope-checked Program.

    Raises ParseError with an accurate location on any lexical,
    syntactic, or scoping fault.
    """
    parser = _Parser(tokenize(source, file))
    program = parser.program(file)
    seen: dict[str, SourceLoc] = {}
    for fn in program.functions:
        if fn.name in seen:
            raise ParseError(
                f"function {fn.name!r} already defined at {seen[fn.name]}", fn.loc
            )
        seen[fn.name] = fn.loc
        _check_scopes(fn)
    return program


def parse_file(path: str) -> Program:
    with open(path, "r", encoding="utf-8") as fh:
        return parse(fh.read(), path)


def validate_program(program: Program) -> None:
    """Whole-program checks run before analysis or interpretation:
    the entry function exists and takes only int params (always true by
    construction), and every call resolves to a defined function or a
    builtin with matching arity and return usage."""
    if not program.has_entry():
        raise ProgramError(f"entry function {program.entry!r} is not defined")
    names = {fn.name: fn for fn in program.functions}
    for fn in program.functions:
        for stmt in _all_stmts(fn):
            if isinstance(stmt, Call):
                if stmt.name in names:
                    callee = names[stmt.name]
                    if len(stmt.args) != len(callee.params):
                        raise ProgramError(
                            f"call to {stmt.name!r} passes {len(stmt.args)} args, "
                            f"expected {len(callee.params)}",
                            stmt.loc,
                        )
                    if stmt.target is not None and not callee.returns_value:
                        raise ProgramError(
                            f"void function {stmt.name!r} used in assignment", stmt.loc
                        )
                elif stmt.name in BUILTINS:
                    if len(stmt.args) != BUILTINS[stmt.name]:
                        raise ProgramError(
                            f"builtin {stmt.name!r} expects {BUILTINS[stmt.name]} args",
                            stmt.loc,
                        )
                    if stmt.target is not None:
                        raise ProgramError(
                            f"builtin {stmt.name!r} returns no value", stmt.loc
                        )
                else:
                    raise ProgramError(f"call to undefined function {stmt.name!r}", stmt.loc)
            elif isinstance(stmt, Return) and stmt.expr is not None and not fn.returns_value:
                raise ProgramError(f"void function {fn.name!r} returns a value", stmt.loc)


def _all_stmts(fn: FuncDef):
    from .ast import iter_stmts

    return iter_stmts(fn.body)
