"""Position-tracking s-expression reader for problem files."""
from __future__ import annotations

import re
from dataclasses import dataclass

from .core import HieraxError


class ProblemSyntaxError(HieraxError):
    """Malformed input; carries a 1-based line and column."""

    def __init__(self, msg: str, line: int = 0, col: int = 0):
        self.line, self.col = line, col
        super().__init__(f"{line}:{col}: {msg}" if line else msg)


@dataclass(frozen=True)
class Symbol:
    text: str
    line: int
    col: int

    def __str__(self):
        return self.text


@dataclass(frozen=True)
class SList:
    items: tuple
    line: int
    col: int

    def __len__(self):
        return len(self.items)

    def __getitem__(self, i):
        return self.items[i]

    def __iter__(self):
        return iter(self.items)

    def head(self) -> str | None:
        return self.items[0].text if self.items and isinstance(self.items[0], Symbol) else None

    def __str__(self):
        return "(" + " ".join(map(str, self.items)) + ")"


_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<comment>;[^\n]*)
  | (?P<open>\()
  | (?P<close>\))
  | (?P<atom>[^\s();]+)
""", re.VERBOSE)


def tokenize(text: str):
    """Yield ``(kind, text, line, col)``; whitespace and comments are dropped."""
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:  # pragma: no cover - the atom class matches everything else
            raise ProblemSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        tok = m.group()
        if kind not in ("ws", "comment"):
            yield kind, tok, line, col
        nl = tok.count("\n")
        if nl:
            line += nl
            col = len(tok) - tok.rfind("\n")
        else:
            col += len(tok)
        pos = m.end()


def read_all(text: str) -> list:
    """All top-level expressions of ``text``."""
    stack: list[tuple[list, int, int]] = []
    top: list = []
    for kind, tok, line, col in tokenize(text):
        if kind == "open":
            stack.append(([], line, col))
        elif kind == "close":
            if not stack:
                raise ProblemSyntaxError("unbalanced ')'", line, col)
            items, l0, c0 = stack.pop()
            node = SList(tuple(items), l0, c0)
            (stack[-1][0] if stack else top).append(node)
        else:
            (stack[-1][0] if stack else top).append(Symbol(tok, line, col))
    if stack:
        _, l0, c0 = stack[-1]
        raise ProblemSyntaxError("unclosed '('", l0, c0)
    return top
