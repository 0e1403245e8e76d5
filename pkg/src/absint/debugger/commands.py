"""Debugger command grammar.

Commands chain with semicolons and abbreviate like gdb: `b #a;c` sets a
breakpoint on the next alarm and continues.  Breakpoint arguments are
`#a`/`#alarm`, `file:line` or a bare line number, a statement kind
(while, assign, ...), or a function name.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from ..ast import TRANSFER_KINDS
from .session import AlarmBP, Breakpoint, FunctionBP, KindBP, LocationBP


class CommandError(Exception):
    pass


@dataclass(frozen=True)
class Break:
    bp: Breakpoint


@dataclass(frozen=True)
class Continue:
    pass


@dataclass(frozen=True)
class Next:
    pass


@dataclass(frozen=True)
class Step:
    pass


@dataclass(frozen=True)
class Finish:
    pass


@dataclass(frozen=True)
class PrintCmd:
    var: Optional[str]


@dataclass(frozen=True)
class Backtrace:
    pass


@dataclass(frozen=True)
class Where:
    pass


@dataclass(frozen=True)
class Quit:
    pass


Command = Union[Break, Continue, Next, Step, Finish, PrintCmd, Backtrace, Where, Quit]

_HELP = (
    "commands: break|b <#alarm|file:line|line|kind|function>, continue|c, "
    "next|n, step|s, finish, print|p [var], backtrace|bt, where|w, quit|q; "
    "chain with ';'"
)


def parse_breakpoint(arg: str) -> Breakpoint:
    if arg in ("#a", "#alarm"):
        return AlarmBP()
    if ":" in arg:
        file, _, line = arg.rpartition(":")
        if not line.isdigit():
            raise CommandError(f"bad breakpoint location {arg!r}; expected file:line")
        return LocationBP(file or None, int(line))
    if arg.isdigit():
        return LocationBP(None, int(arg))
    if arg in TRANSFER_KINDS:
        return KindBP(arg)
    return FunctionBP(arg)


def parse_command(text: str) -> list[Command]:
    """Parse a possibly-chained command line; raises CommandError with
    the command list on anything unknown (the session survives)."""
    commands: list[Command] = []
    for chunk in text.split(";"):
        words = chunk.split()
        if not words:
            continue
        head, args = words[0], words[1:]
        if head in ("b", "break"):
            if len(args) != 1:
                raise CommandError(f"break takes one argument. {_HELP}")
            commands.append(Break(parse_breakpoint(args[0])))
        elif head in ("c", "continue") and not args:
            commands.append(Continue())
        elif head in ("n", "next") and not args:
            commands.append(Next())
        elif head in ("s", "step") and not args:
            commands.append(Step())
        elif head == "finish" and not args:
            commands.append(Finish())
        elif head in ("p", "print"):
            if len(args) > 1:
                raise CommandError(f"print takes at most one variable. {_HELP}")
            commands.append(PrintCmd(args[0] if args else None))
        elif head in ("bt", "backtrace") and not args:
            commands.append(Backtrace())
        elif head in ("w", "where") and not args:
            commands.append(Where())
        elif head in ("q", "quit") and not args:
            commands.append(Quit())
        else:
            raise CommandError(f"unknown command {chunk.strip()!r}. {_HELP}")
    return commands
