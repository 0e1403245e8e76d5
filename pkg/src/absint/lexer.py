"""Tokenizer for MiniImp source text."""

from __future__ import annotations

from dataclasses import dataclass

from .ast import SourceLoc

KEYWORDS = frozenset(
    {"int", "void", "if", "else", "while", "for", "assert", "return", "print", "rand"}
)

# Longest-match first.
_OPERATORS = (
    "<=",
    ">=",
    "==",
    "!=",
    "&&",
    "||",
    "++",
    "--",
    "+",
    "-",
    "*",
    "/",
    "%",
    "<",
    ">",
    "!",
    "=",
    ";",
    ",",
    "(",
    ")",
    "{",
    "}",
)


class ParseError(Exception):
    """Lexical or syntactic error, carrying the offending location."""

    def __init__(self, message: str, loc: SourceLoc):
        super().__init__(f"{loc}: {message}")
        self.message = message
        self.loc = loc


@dataclass(frozen=True)
class Token:
    kind: str  # "int", "ident", "kw", "op", "eof"
    text: str
    loc: SourceLoc

    def __repr__(self) -> str:
        return f"Token({self.kind}, {self.text!r}, {self.loc})"


def tokenize(source: str, file: str) -> list[Token]:
    tokens: list[Token] = []
    i = 0
    line = 1
    col = 1
    n = len(source)

    def loc() -> SourceLoc:
        return SourceLoc(file, line, col)

    while i < n:
        c = source[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if source.startswith("//", i):
            while i < n and source[i] != "\n":
                i += 1
            continue
        if source.startswith("/*", i):
            start = loc()
            i += 2
            col += 2
            while i < n and not source.startswith("*/", i):
                if source[i] == "\n":
                    line += 1
                    col = 1
                else:
                    col += 1
                i += 1
            if i >= n:
                raise ParseError("unterminated comment", start)
            i += 2
            col += 2
            continue
        if c.isdigit():
            start = loc()
            j = i
            while j < n and source[j].isdigit():
                j += 1
            tokens.append(Token("int", source[i:j], start))
            col += j - i
            i = j
            continue
        if c.isalpha() or c == "_":
            start = loc()
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            text = source[i:j]
            kind = "kw" if text in KEYWORDS else "ident"
            tokens.append(Token(kind, text, start))
            col += j - i
            i = j
            continue
        for op in _OPERATORS:
            if source.startswith(op, i):
                tokens.append(Token("op", op, loc()))
                i += len(op)
                col += len(op)
                break
        else:
            raise ParseError(f"unexpected character {c!r}", loc())

    tokens.append(Token("eof", "", SourceLoc(file, line, col)))
    return tokens
