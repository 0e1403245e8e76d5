"""The abstract interpreter.

A forward, over-approximating analysis from the entry function, with
entry parameters modeled symbolically (full i32 range).  Calls are
analyzed by virtual inlining, fully context-sensitive, with a recursion
cutoff that havocs the return value and records a soundness assumption.

Statement dispatch follows a delegation discipline: handlers are tried
in configuration order and each may decline, so a statement nobody
claims is an internal error rather than a silent skip.  Machine-integer
arithmetic is checked against the i32 range; an operation proved
overflow-free is re-typed to a mathematical operation (visible in
traces), otherwise an alarm is recorded and the analysis continues
under the assumption that the error did not occur.

Loops run an ascending iteration (plain joins for `widening_delay`
steps, then widening with thresholds) to a post-fixpoint, a bounded
descending (narrowing) iteration, and then one final authoritative pass
over the body at the stabilized invariant.  Checks reach the report
only from final passes, which keeps reports deterministic and lets
narrowing erase transient widening alarms; hook events fire on every
pass, including iterations.
"""

from __future__ import annotations

import time
import traceback
from dataclasses import dataclass, field
from typing import Callable, Optional

from ..ast import (
    ARITH_OPS,
    BUILTINS,
    CMP_OPS,
    LOGIC_OPS,
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
    stmt_kind,
)
from ..checks import ALARM, SAFE, TOOL_VERSION, CheckKind, CheckRecord, Report
from ..domains import Domain
from ..domains.interval import (
    BOTTOM,
    I32_FULL,
    Interval,
    ThresholdSet,
    interval_binop,
    interval_cmp,
    interval_logic,
    interval_meet,
    interval_neg,
    mk,
    singleton,
    without_zero,
)
from ..hooks import (
    AlarmRaised,
    ExprEvaluated,
    FunctionEnter,
    FunctionExit,
    HookBus,
    LoopIteration,
    StateView,
    StmtAfter,
    StmtBefore,
)
from ..parser import validate_program
from .config import Configuration, build_domain

_NEGATE = {"<": ">=", "<=": ">", ">": "<=", ">=": "<", "==": "!=", "!=": "=="}


class InternalError(Exception):
    """Analyzer fault (not a property of the analyzed program)."""


class AbortAnalysis(Exception):
    """Raised from a checkpoint to tear a debugger session down."""


@dataclass
class AnalysisOptions:
    widening_delay: int = 1
    narrowing_passes: int = 1
    thresholds_mode: str = "static"  # "static" | "collected"
    iteration_cap: int = 1000
    recursion_limit: int = 8

    @classmethod
    def from_config(cls, config: Configuration) -> "AnalysisOptions":
        return cls(
            widening_delay=config.widening_delay,
            narrowing_passes=config.narrowing_passes,
            thresholds_mode=config.thresholds,
        )


class Checkpoint:
    """Pause points for interactive drivers; the batch analyzer uses
    this no-op implementation."""

    def on_stmt(self, analyzer: "Analyzer", stmt: Stmt, state: object) -> None:
        pass

    def on_expr(self, analyzer: "Analyzer", expr: Expr, value: Interval) -> None:
        pass

    def on_enter(self, analyzer: "Analyzer", name: str) -> None:
        pass

    def on_exit(self, analyzer: "Analyzer", name: str) -> None:
        pass

    def on_alarm(self, analyzer: "Analyzer", check: CheckRecord) -> None:
        pass


class _Frame:
    def __init__(self, fn: str, depth: int, call_loc: Optional[SourceLoc], returns_value: bool):
        self.fn = fn
        self.depth = depth
        self.call_loc = call_loc
        self.returns_value = returns_value
        self.scope: dict[str, str] = {}  # display name -> qualified name
        self.blocks: list[list[str]] = []
        self.ret_state: Optional[object] = None

    def qualify(self, name: str) -> str:
        return name if self.depth == 0 else f"{name}@{self.depth}"

    @property
    def ret_var(self) -> str:
        return f"__ret@{self.depth}"

    def declare(self, name: str) -> str:
        qual = self.qualify(name)
        self.scope[name] = qual
        if self.blocks:
            self.blocks[-1].append(name)
        return qual


class Analyzer:
    def __init__(
        self,
        program: Program,
        domain: Domain,
        options: Optional[AnalysisOptions] = None,
        hooks: Optional[HookBus] = None,
        config_name: str = "custom",
        program_id: str = "<memory>",
        checkpoint: Optional[Checkpoint] = None,
    ):
        self.program = program
        self.domain = domain
        self.opts = options or AnalysisOptions()
        self.bus = hooks or HookBus()
        self.config_name = config_name
        self.program_id = program_id
        self.checkpoint = checkpoint or Checkpoint()
        if self.opts.thresholds_mode == "collected":
            from ..hooks.thresholds import collect_thresholds

            self.thresholds = collect_thresholds(program)
        else:
            self.thresholds = ThresholdSet.default()

        self.frames: list[_Frame] = []
        self.recording = True
        self.checks: dict[tuple, CheckRecord] = {}
        self.assumptions: dict[str, None] = {}
        self.crash: Optional[dict] = None
        # in-flight statements with their pre-states, innermost last;
        # lets alarm stops jump back to the statement's entry state
        self.stmt_stack: list[tuple[Stmt, object]] = []
        # (loop loc, iteration index) nest for stop banners
        self.loop_stack: list[tuple[SourceLoc, int]] = []

    # -- naming and views --

    def resolve(self, name: str) -> str:
        return self.frames[-1].scope[name]

    def callstack_names(self) -> tuple[str, ...]:
        return tuple(f.fn for f in self.frames)

    def view(self, state: object) -> StateView:
        return StateView(self.domain, state, self.frames[-1].scope)

    # -- reporting --

    def record_assumption(self, text: str) -> None:
        self.assumptions.setdefault(text)

    def record_check(self, kind: CheckKind, verdict: str, loc: SourceLoc, detail: str) -> None:
        """verdict is "safe", "may" (may fail) or "definite" (must fail)."""
        status = SAFE if verdict == "safe" else ALARM
        check = CheckRecord(kind, loc, status, self.callstack_names(), detail)
        if status == ALARM:
            self.bus.dispatch(AlarmRaised(check))
        if not self.recording:
            return
        key = (loc.key(), kind, check.callstack)
        prev = self.checks.get(key)
        if prev is None or status == ALARM:
            self.checks[key] = check  # an alarm is never downgraded
        if status == ALARM:
            self.checkpoint.on_alarm(self, check)

    # -- expression evaluation --

    def _expr_event(self, expr: Expr, value: Interval, record: bool) -> None:
        if not record or isinstance(expr, IntLit):
            return
        self.bus.dispatch(ExprEvaluated(expr, value, self.callstack_names()))
        self.checkpoint.on_expr(self, expr, value)

    def eval_expr(self, expr: Expr, state: object, record: bool) -> tuple[Interval, object]:
        """Evaluate to an interval projection; threads the state because
        divisor refinement (post-error continuation) can tighten it."""
        if isinstance(expr, IntLit):
            return singleton(expr.value), state
        if isinstance(expr, Var):
            value = self.domain.project(state, self.resolve(expr.name))
            self._expr_event(expr, value, record)
            return value, state
        if isinstance(expr, Rand):
            value = mk(expr.lo, expr.hi)
            self._expr_event(expr, value, record)
            return value, state
        if isinstance(expr, Not):
            inner, state = self.eval_expr(expr.operand, state, record)
            if inner.empty:
                return BOTTOM, state
            value = interval_cmp("==", inner, singleton(0))
            self._expr_event(expr, value, record)
            return value, state
        if isinstance(expr, Neg):
            inner, state = self.eval_expr(expr.operand, state, record)
            if inner.empty:
                return BOTTOM, state
            value = interval_neg(inner)
            shown = expr
            if expr.ty == IntType.I32:
                value, shown = self._overflow_check(expr, value, record)
                if value.empty:
                    return BOTTOM, state
            self._expr_event(shown, value, record)
            return value, state
        if isinstance(expr, Binop):
            return self._eval_binop(expr, state, record)
        raise InternalError(f"unhandled expression kind {type(expr).__name__} at {expr.loc}")

    def _eval_binop(self, expr: Binop, state: object, record: bool) -> tuple[Interval, object]:
        a, state = self.eval_expr(expr.lhs, state, record)
        b, state = self.eval_expr(expr.rhs, state, record)
        if a.empty or b.empty:
            return BOTTOM, state
        op = expr.op
        if op in CMP_OPS:
            value = interval_cmp(op, a, b)
            self._expr_event(expr, value, record)
            return value, state
        if op in LOGIC_OPS:
            value = interval_logic(op, a, b)
            self._expr_event(expr, value, record)
            return value, state
        assert op in ARITH_OPS, op
        if op in ("/", "%"):
            kind = CheckKind.DIVISION_BY_ZERO if op == "/" else CheckKind.MODULO_BY_ZERO
            if b == singleton(0):
                self.record_check(kind, "definite", expr.loc, "divisor is 0")
                return BOTTOM, state
            if b.contains(0):
                self.record_check(kind, "may", expr.loc, f"divisor may be 0 (range {b!r})")
            else:
                self.record_check(kind, "safe", expr.loc, f"divisor in {b!r}")
            b = without_zero(b)
            if isinstance(expr.rhs, Var):  # continue assuming no zero divisor
                state = self.domain.refine(state, self.resolve(expr.rhs.name), b)
        value, may_overflow, _ = interval_binop(op, a, b, expr.ty)
        shown: Expr = expr
        if expr.ty == IntType.I32:
            if may_overflow:
                clamped = interval_meet(value, I32_FULL)
                verdict = "definite" if clamped.empty else "may"
                self.record_check(
                    CheckKind.INTEGER_OVERFLOW,
                    verdict,
                    expr.loc,
                    f"result may reach {value!r}, outside i32",
                )
                value = clamped
                if value.empty:
                    return BOTTOM, state
            else:
                self.record_check(
                    CheckKind.INTEGER_OVERFLOW, "safe", expr.loc, f"result in {value!r}"
                )
                # proved overflow-free: re-typed to a math operation
                shown = Binop(op, expr.lhs, expr.rhs, IntType.MATH, expr.loc)
        self._expr_event(shown, value, record)
        return value, state

    def _overflow_check(self, expr: Neg, value: Interval, record: bool) -> tuple[Interval, Expr]:
        if value.subset_i32():
            self.record_check(
                CheckKind.INTEGER_OVERFLOW, "safe", expr.loc, f"result in {value!r}"
            )
            return value, Neg(expr.operand, IntType.MATH, expr.loc)
        clamped = interval_meet(value, I32_FULL)
        verdict = "definite" if clamped.empty else "may"
        self.record_check(
            CheckKind.INTEGER_OVERFLOW,
            verdict,
            expr.loc,
            f"result may reach {value!r}, outside i32",
        )
        return clamped, expr

    # -- condition refinement --

    def assume(self, state: object, expr: Expr, positive: bool) -> object:
        if self.domain.is_bottom(state):
            return state
        if isinstance(expr, Not):
            return self.assume(state, expr.operand, not positive)
        if isinstance(expr, Binop) and expr.op in LOGIC_OPS:
            conj = (expr.op == "&&") == positive
            if conj:
                # both sides must hold (after De Morgan for a negated ||)
                first = self.assume(state, expr.lhs, positive)
                return self.assume(first, expr.rhs, positive)
            left = self.assume(state, expr.lhs, positive)
            both = self.assume(self.assume(state, expr.lhs, not positive), expr.rhs, positive)
            return self.domain.join(left, both)
        if isinstance(expr, Binop) and expr.op in CMP_OPS:
            op = expr.op if positive else _NEGATE[expr.op]
            return self._assume_cmp(state, op, expr.lhs, expr.rhs)
        # integer-valued condition: nonzero means true
        zero = IntLit(0, IntType.I32, expr.loc)
        return self._assume_cmp(state, "!=" if positive else "==", expr, zero)

    def _assume_cmp(self, state: object, op: str, lhs: Expr, rhs: Expr) -> object:
        def evaluate(e: Expr) -> Interval:
            return self.eval_expr(e, state, record=False)[0]

        result = self.domain.assume_cmp(state, op, lhs, rhs, self.resolve, evaluate)
        return state if result is None else result

    # -- statements --

    def exec_stmt(self, stmt: Stmt, state: object) -> object:
        if self.domain.is_bottom(state):
            return state  # not analyzed, not covered
        self.checkpoint.on_stmt(self, stmt, state)
        pre = state
        self.stmt_stack.append((stmt, pre))
        self.bus.dispatch(StmtBefore(stmt, self.view(pre)))
        try:
            post = self._dispatch(stmt, pre)
        finally:
            self.stmt_stack.pop()
        self.bus.dispatch(StmtAfter(stmt, self.view(pre), self.view(post)))
        return post

    def _dispatch(self, stmt: Stmt, state: object) -> object:
        for handler in (self._exec_control, self._exec_numeric):
            result = handler(stmt, state)
            if result is not None:
                return result
        raise InternalError(f"unhandled statement kind {stmt_kind(stmt)} at {stmt.loc}")

    def exec_block(self, stmts: list[Stmt], state: object) -> object:
        frame = self.frames[-1]
        frame.blocks.append([])
        try:
            for stmt in stmts:
                state = self.exec_stmt(stmt, state)
        finally:
            for name in reversed(frame.blocks.pop()):
                state = self.domain.forget(state, frame.scope.pop(name))
        return state

    def _exec_numeric(self, stmt: Stmt, state: object) -> Optional[object]:
        if isinstance(stmt, Decl):
            value, state = self.eval_expr(stmt.init, state, self.recording)
            qual = self.frames[-1].declare(stmt.name)
            return self.domain.declare(state, qual, value)
        if isinstance(stmt, Assign):
            value, state = self.eval_expr(stmt.expr, state, self.recording)
            result = self.domain.assign(
                state, self.resolve(stmt.name), stmt.expr, self.resolve, value
            )
            if result is None:
                raise InternalError(f"no domain handled assignment at {stmt.loc}")
            return result
        return None

    def _exec_control(self, stmt: Stmt, state: object) -> Optional[object]:
        if isinstance(stmt, If):
            _, state = self.eval_expr(stmt.cond, state, self.recording)
            then_out = self.exec_block(stmt.then_body, self.assume(state, stmt.cond, True))
            else_out = self.exec_block(stmt.else_body, self.assume(state, stmt.cond, False))
            return self.domain.join(then_out, else_out)
        if isinstance(stmt, While):
            return self.fixpoint_loop(stmt, state)
        if isinstance(stmt, Assert):
            _, state = self.eval_expr(stmt.cond, state, self.recording)
            hold = self.assume(state, stmt.cond, True)
            fail = self.assume(state, stmt.cond, False)
            if self.domain.is_bottom(fail):
                self.record_check(
                    CheckKind.ASSERT_FAILURE, "safe", stmt.loc, "condition always holds"
                )
            elif self.domain.is_bottom(hold):
                self.record_check(
                    CheckKind.ASSERT_FAILURE, "definite", stmt.loc, "condition never holds"
                )
            else:
                self.record_check(
                    CheckKind.ASSERT_FAILURE, "may", stmt.loc, "condition may fail"
                )
            return hold
        if isinstance(stmt, Print):
            return state  # concrete-side effect only; no abstract effect
        if isinstance(stmt, Return):
            return self._exec_return(stmt, state)
        if isinstance(stmt, Call):
            return self._exec_call(stmt, state)
        return None

    # -- loops --

    def fixpoint_loop(self, stmt: While, state: object) -> object:
        domain = self.domain
        entry = state
        head = entry
        saved_recording = self.recording
        self.recording = False
        self.loop_stack.append((stmt.loc, 0))
        iteration = 0
        try:
            while True:
                if iteration >= self.opts.iteration_cap:
                    raise InternalError(
                        f"fixpoint divergence at {stmt.loc}: "
                        f"no stable invariant after {iteration} iterations"
                    )
                self.loop_stack[-1] = (stmt.loc, iteration)
                self.bus.dispatch(LoopIteration(stmt.loc, iteration))
                queried = domain.prepare(head)
                body_out = self.exec_block(
                    stmt.body, self.assume(queried, stmt.cond, True)
                )
                candidate = domain.join(entry, body_out)
                if domain.leq(candidate, head):
                    break
                if iteration < self.opts.widening_delay:
                    head = domain.join(head, candidate)
                else:
                    head = domain.widen(head, candidate, self.thresholds)
                iteration += 1
            for _ in range(self.opts.narrowing_passes):
                queried = domain.prepare(head)
                body_out = self.exec_block(
                    stmt.body, self.assume(queried, stmt.cond, True)
                )
                head = domain.join(entry, body_out)
        finally:
            self.recording = saved_recording
            self.loop_stack.pop()
        # final authoritative pass at the stabilized invariant: the one
        # whose checks reach the report
        invariant = domain.prepare(head)
        _, invariant = self.eval_expr(stmt.cond, invariant, self.recording)
        body_in = self.assume(invariant, stmt.cond, True)
        if not domain.is_bottom(body_in):
            self.exec_block(stmt.body, body_in)
        return self.assume(invariant, stmt.cond, False)

    # -- calls --

    def _exec_return(self, stmt: Return, state: object) -> object:
        domain = self.domain
        frame = self.frames[-1]
        value: Optional[Interval] = None
        if stmt.expr is not None:
            value, state = self.eval_expr(stmt.expr, state, self.recording)
            if value.empty:
                return domain.bottom_like(state)
        ret_state = state
        if frame.returns_value:
            ret = value if value is not None else singleton(0)
            ret_state = domain.declare(ret_state, frame.ret_var, ret)
            if stmt.expr is not None:
                assigned = domain.assign(
                    ret_state, frame.ret_var, stmt.expr, self.resolve, ret
                )
                if assigned is not None:
                    ret_state = assigned
        ret_state = self._drop_frame_vars(ret_state, frame)
        frame.ret_state = (
            ret_state
            if frame.ret_state is None
            else domain.join(frame.ret_state, ret_state)
        )
        return domain.bottom_like(state)

    def _drop_frame_vars(self, state: object, frame: _Frame) -> object:
        for qual in frame.scope.values():
            state = self.domain.forget(state, qual)
        return state

    def _exec_call(self, stmt: Call, state: object) -> Optional[object]:
        domain = self.domain
        if stmt.name in BUILTINS:
            return self._exec_builtin(stmt, state)
        callee = self.program.function(stmt.name)
        if callee is None:
            raise InternalError(f"call to unknown function {stmt.name!r} at {stmt.loc}")
        arg_values: list[Interval] = []
        for arg in stmt.args:
            v, state = self.eval_expr(arg, state, self.recording)
            if v.empty:
                return domain.bottom_like(state)
            arg_values.append(v)

        if sum(1 for f in self.frames if f.fn == stmt.name) >= self.opts.recursion_limit:
            self.record_assumption(
                f"recursion truncated at {stmt.name}: "
                "return value assumed to span the full i32 range"
            )
            if stmt.target is not None:
                state = domain.havoc(state, self.resolve(stmt.target), I32_FULL)
            return state

        # virtual inlining: the callee's variables join the caller's
        # state under frame-qualified names, so relations survive calls
        caller = self.frames[-1]
        frame = _Frame(stmt.name, len(self.frames), stmt.loc, callee.returns_value)
        self.frames.append(frame)
        self.bus.dispatch(FunctionEnter(stmt.name, self.callstack_names()))
        self.checkpoint.on_enter(self, stmt.name)
        started = time.perf_counter_ns()
        try:
            caller_resolve = caller.scope.__getitem__
            for param, arg, v in zip(callee.params, stmt.args, arg_values):
                qual = frame.declare(param)
                state = domain.declare(state, qual, v)
                relational = domain.assign(state, qual, arg, caller_resolve, v)
                if relational is not None:
                    state = relational
            exit_state = self.exec_block(callee.body, state)
            if not domain.is_bottom(exit_state):
                if callee.returns_value:  # falling off the end returns 0
                    exit_state = domain.declare(exit_state, frame.ret_var, singleton(0))
                exit_state = self._drop_frame_vars(exit_state, frame)
            final = (
                exit_state
                if frame.ret_state is None
                else domain.join(exit_state, frame.ret_state)
            )
        finally:
            self.frames.pop()
            self.bus.dispatch(
                FunctionExit(stmt.name, time.perf_counter_ns() - started)
            )
            self.checkpoint.on_exit(self, stmt.name)
        if domain.is_bottom(final):
            return final
        if stmt.target is not None and callee.returns_value:
            target = self.resolve(stmt.target)
            ret = domain.project(final, frame.ret_var)
            assigned = domain.assign(
                final, target, Var(frame.ret_var, stmt.loc), lambda n: n, ret
            )
            final = assigned if assigned is not None else domain.havoc(final, target, ret)
        if callee.returns_value:
            final = domain.forget(final, frame.ret_var)
        return final

    def _exec_builtin(self, stmt: Call, state: object) -> object:
        value, state = self.eval_expr(stmt.args[0], state, self.recording)
        if value.empty:
            return self.domain.bottom_like(state)
        if stmt.name == "__builtin_crash_if_mod_by_negative":
            from ..domains.interval import ext_lt

            if ext_lt(value.lo, 0):
                raise InternalError(
                    f"planted crash: modulo by possibly-negative value at {stmt.loc}"
                )
            return state
        raise InternalError(f"unknown builtin {stmt.name!r} at {stmt.loc}")

    # -- entry point --

    def run(self) -> Report:
        started = time.perf_counter_ns()
        validate_program(self.program)
        entry = self.program.function(self.program.entry)
        frame = _Frame(entry.name, 0, None, entry.returns_value)
        self.frames = [frame]
        state = self.domain.make_top(())
        self.bus.dispatch(FunctionEnter(entry.name, (entry.name,)))
        self.checkpoint.on_enter(self, entry.name)
        try:
            for param in entry.params:
                qual = frame.declare(param)
                state = self.domain.declare(state, qual, I32_FULL)
            self.exec_block(entry.body, state)
        except AbortAnalysis:
            raise
        except InternalError as exc:
            self.crash = {"message": str(exc), "type": "InternalError"}
        except RecursionError as exc:
            self.crash = {"message": f"RecursionError: {exc}", "type": "RecursionError"}
        except Exception as exc:  # uncaught fault: recorded, not masked
            self.crash = {
                "message": f"{type(exc).__name__}: {exc}",
                "type": "unexpected",
                "traceback": traceback.format_exc(),
            }
        elapsed = time.perf_counter_ns() - started
        self.bus.dispatch(FunctionExit(entry.name, elapsed))
        self.checkpoint.on_exit(self, entry.name)
        assumptions = list(self.assumptions)
        assumptions.extend(self.bus.failures)
        return Report(
            tool_version=TOOL_VERSION,
            program_id=self.program_id,
            configuration=self.config_name,
            time_ms=elapsed // 1_000_000,
            checks=sorted(self.checks.values(), key=CheckRecord.sort_key),
            assumptions=assumptions,
            coverage=None,
            crash=self.crash,
        )


def analyze(
    program: Program,
    config: Configuration,
    hooks: Optional[HookBus] = None,
    program_id: str = "<memory>",
    checkpoint: Optional[Checkpoint] = None,
) -> Report:
    """Analyze a program under a configuration; never raises for
    analyzer faults (they land in the report's crash info)."""
    analyzer = Analyzer(
        program,
        build_domain(config),
        AnalysisOptions.from_config(config),
        hooks=hooks,
        config_name=config.name,
        program_id=program_id,
        checkpoint=checkpoint,
    )
    return analyzer.run()
