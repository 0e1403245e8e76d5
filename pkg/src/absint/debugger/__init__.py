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
from .session import (
    AlarmBP,
    Breakpoint,
    DebugError,
    DebugSession,
    FunctionBP,
    KindBP,
    LocationBP,
    StopState,
)

__all__ = [
    "AlarmBP",
    "Backtrace",
    "Break",
    "Breakpoint",
    "CommandError",
    "Continue",
    "DebugError",
    "DebugSession",
    "Finish",
    "FunctionBP",
    "KindBP",
    "LocationBP",
    "Next",
    "PrintCmd",
    "Quit",
    "Step",
    "StopState",
    "Where",
    "parse_command",
]
