"""Command-line front end for debug sessions.

Reads commands from the terminal (prompt `absint >> `) or replays a
script file; the latter is how side-by-side debugging of two
configurations works: feed the same script to two terminals.  Print
output goes to stdout verbatim, one projection per line, so other
tools (and the test suite) can scrape it.
"""

from __future__ import annotations

import sys
from typing import IO, Iterable, Optional

from .commands import (
    Backtrace,
    Break,
    CommandError,
    Continue,
    Finish,
    Next,
    PrintCmd,
    Quit,
    Step,
    Where,
    parse_command,
)
from .session import DebugError, DebugSession, StopState

PROMPT = "absint >> "


def stop_banner(stop: StopState) -> str:
    if stop.reason == "finished":
        return "[stop] analysis finished"
    where = f" at {stop.loc}" if stop.loc else ""
    it = f" (iteration {stop.iteration})" if stop.iteration is not None else ""
    text = f"[stop] {stop.reason}{where} in {stop.function}{it}"
    if stop.detail:
        text += f": {stop.detail}"
    return text


def source_line(stop: StopState) -> Optional[str]:
    if stop.loc is None:
        return None
    try:
        with open(stop.loc.file, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
        if 1 <= stop.loc.line <= len(lines):
            return f"{stop.loc.line:5d} | {lines[stop.loc.line - 1]}"
    except OSError:
        pass
    return None


def run_repl(
    session: DebugSession,
    script: Optional[Iterable[str]] = None,
    out: IO[str] = sys.stdout,
    show_prompt: Optional[bool] = None,
) -> int:
    """Drive a session from a script iterable, or from stdin when none
    is given.  Returns the process exit code."""

    def emit(text: str) -> None:
        out.write(text + "\n")
        out.flush()

    def show(stop: StopState) -> None:
        emit(stop_banner(stop))
        if stop.alarm is not None:
            emit(f"alarm: {stop.alarm.kind.value}: {stop.alarm.detail}")
        line = source_line(stop)
        if line:
            emit(line)

    def execute(cmd) -> bool:
        """Returns False when the session should end."""
        if isinstance(cmd, Quit):
            return False
        if isinstance(cmd, Break):
            _, message = session.add_breakpoint(cmd.bp)
            if message:
                emit(message)
        elif isinstance(cmd, Continue):
            show(session.resume("continue"))
        elif isinstance(cmd, Next):
            show(session.resume("next"))
        elif isinstance(cmd, Step):
            show(session.resume("step"))
        elif isinstance(cmd, Finish):
            show(session.resume("finish"))
        elif isinstance(cmd, PrintCmd):
            for line in session.render_print(cmd.var):
                emit(line)
        elif isinstance(cmd, Backtrace):
            for line in session.backtrace():
                emit(line)
        elif isinstance(cmd, Where):
            if session.current is not None:
                show(session.current)
        return True

    interactive = script is None
    if show_prompt is None:
        show_prompt = interactive and sys.stdin.isatty()
    source: Iterable[str] = script if script is not None else sys.stdin

    show(session.start())
    try:
        if show_prompt:
            out.write(PROMPT)
            out.flush()
        for raw in source:
            line = raw.strip()
            alive = True
            try:
                for cmd in parse_command(line):
                    if not execute(cmd):
                        alive = False
                        break
            except CommandError as exc:
                emit(str(exc))
            except DebugError as exc:
                emit(str(exc))
            if not alive:
                break
            if show_prompt:
                out.write(PROMPT)
                out.flush()
    finally:
        session.quit()
    return 0
