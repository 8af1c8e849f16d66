"""Tokenizer for the ``.heco`` source language."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from ..errors import LexError


class TokenKind(str, Enum):
    IDENT = "identifier"
    KEYWORD = "keyword"
    INT = "integer-literal"
    PUNCT = "punctuation"
    OP = "operator"
    EOF = "end-of-input"


KEYWORDS = frozenset({"secret", "int", "for", "in", "return", "const"})

# longest match first
_OPERATORS = ("<<", "+=", "-=", "*=", "+", "-", "*", "%", "=")
_PUNCT = ("..", "(", ")", "[", "]", "{", "}", ",", ";", ":")


@dataclass(frozen=True)
class Span:
    line: int
    column: int
    offset: int
    length: int

    @property
    def end(self) -> int:
        return self.offset + self.length


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    text: str
    span: Span

    def __repr__(self) -> str:
        return f"Token({self.kind.name}, {self.text!r}, {self.span.line}:{self.span.column})"


def tokenize(source: str) -> list[Token]:
    """Split ``source`` into tokens, ending with an EOF token.

    Whitespace and ``//`` line comments separate tokens and are dropped.
    """
    tokens: list[Token] = []
    i, line, line_start = 0, 1, 0
    n = len(source)

    def span(start: int, length: int) -> Span:
        return Span(line, start - line_start + 1, start, length)

    while i < n:
        c = source[i]
        if c == "\n":
            i += 1
            line += 1
            line_start = i
            continue
        if c in " \t\r\f":
            i += 1
            continue
        if source.startswith("//", i):
            while i < n and source[i] != "\n":
                i += 1
            continue
        if c.isdigit():
            j = i
            while j < n and source[j].isdigit():
                j += 1
            if j < n and (source[j].isalpha() or source[j] == "_"):
                raise LexError(f"malformed integer literal {source[i:j + 1]!r}", line, i - line_start + 1)
            tokens.append(Token(TokenKind.INT, source[i:j], span(i, j - i)))
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            text = source[i:j]
            kind = TokenKind.KEYWORD if text in KEYWORDS else TokenKind.IDENT
            tokens.append(Token(kind, text, span(i, j - i)))
            i = j
            continue
        for text in _PUNCT:
            if source.startswith(text, i):
                tokens.append(Token(TokenKind.PUNCT, text, span(i, len(text))))
                i += len(text)
                break
        else:
            for text in _OPERATORS:
                if source.startswith(text, i):
                    tokens.append(Token(TokenKind.OP, text, span(i, len(text))))
                    i += len(text)
                    break
            else:
                if c == "/" or c == ".":
                    raise LexError(f"unterminated or illegal token starting with {c!r}", line, i - line_start + 1)
                raise LexError(f"illegal character {c!r}", line, i - line_start + 1)
    tokens.append(Token(TokenKind.EOF, "", Span(line, i - line_start + 1, i, 0)))
    return tokens
