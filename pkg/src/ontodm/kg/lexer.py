"""Tokenizer shared by the Turtle-subset, N-Triples and query parsers."""

from __future__ import annotations

import bisect
import re
from dataclasses import dataclass


class SyntaxErrorAt(ValueError):
    """Parse failure carrying a 1-based line and column."""

    def __init__(self, message: str, line: int, column: int, expected=()):
        self.message = message
        self.line = line
        self.column = column
        self.expected = tuple(expected)
        detail = f" (expected one of: {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"line {line}, column {column}: {message}{detail}")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    pos: int


_PATTERNS = [
    ("WS", r"[ \t\r\n]+"),
    ("COMMENT", r"#[^\n]*"),
    ("STRING", r'"""(?:[^"\\]|\\.|"(?!""))*"""|\'\'\'(?:[^\'\\]|\\.|\'(?!\'\'))*\'\'\''
               r'|"(?:[^"\\\n]|\\.)*"|\'(?:[^\'\\\n]|\\.)*\''),
    ("IRI", r"<[^<>\"{}|^`\\\x00-\x20]*>"),
    ("BNODE", r"_:[A-Za-z0-9_][A-Za-z0-9_\-.]*"),
    ("VAR", r"[?$][A-Za-z0-9_]+"),
    ("LANG", r"@[A-Za-z]+(?:-[A-Za-z0-9]+)*"),
    ("DTYPE", r"\^\^"),
    ("PNAME", r"(?:[A-Za-z][A-Za-z0-9_\-.]*)?:(?:[A-Za-z0-9_][A-Za-z0-9_\-.]*)?"),
    ("NUMBER", r"[+-]?(?:\d*\.\d+(?:[eE][+-]?\d+)?|\d+[eE][+-]?\d+|\d+)"),
    ("NAME", r"[A-Za-z_][A-Za-z0-9_]*"),
    ("OP", r"!=|<=|>=|=|<|>|&&|\|\|"),
    ("PUNCT", r"[{}()\[\].;,^*!]"),
]
_REGEX = re.compile("|".join(f"(?P<{name}>{pat})" for name, pat in _PATTERNS))


class Lexer:
    def __init__(self, text: str):
        self.text = text
        self._line_starts = [0] + [m.end() for m in re.finditer(r"\n", text)]

    def position(self, pos: int) -> tuple[int, int]:
        line = bisect.bisect_right(self._line_starts, pos)
        return line, pos - self._line_starts[line - 1] + 1

    def error(self, message: str, pos: int, expected=()) -> SyntaxErrorAt:
        line, col = self.position(pos)
        return SyntaxErrorAt(message, line, col, expected)

    def tokens(self) -> list[Token]:
        out = []
        pos = 0
        text = self.text
        while pos < len(text):
            m = _REGEX.match(text, pos)
            if not m:
                raise self.error(f"unexpected character {text[pos]!r}", pos)
            kind = m.lastgroup
            value = m.group()
            if kind in ("PNAME", "BNODE") and value.endswith("."):
                # a trailing dot terminates the statement, it is not part of the name
                value = value.rstrip(".")
                if kind == "BNODE" and value == "_:":
                    raise self.error("empty blank node label", pos)
            if kind not in ("WS", "COMMENT"):
                out.append(Token(kind, value, pos))
            pos += len(value)
        out.append(Token("EOF", "", len(text)))
        return out


_UNESCAPE = re.compile(r"\\(u[0-9A-Fa-f]{4}|U[0-9A-Fa-f]{8}|.)", re.S)
_SIMPLE = {"n": "\n", "t": "\t", "r": "\r", "b": "\b", "f": "\f", '"': '"', "'": "'", "\\": "\\"}


def unquote(token_text: str) -> str:
    if token_text[:3] in ('"""', "'''"):
        body = token_text[3:-3]
    else:
        body = token_text[1:-1]

    def repl(m):
        esc = m.group(1)
        if esc[0] in "uU":
            return chr(int(esc[1:], 16))
        if esc in _SIMPLE:
            return _SIMPLE[esc]
        raise ValueError(f"bad escape \\{esc}")

    return _UNESCAPE.sub(repl, body)
