"""Tokenizer and cursor shared by the .kb, .asm, .psa and .proj parsers.

One token grammar covers all four languages: identifiers, numbers (with
optional sign and exponent), double-quoted strings with backslash escapes,
``//`` comments and a small set of punctuation marks.  Keywords are plain
identifiers; each parser owns its reserved-word set.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .errors import ParseError, SourceSpan
from .model import Name, is_identifier

IDENT = "identifier"
NUMBER = "number"
STRING = "string"
PUNCT = "punctuation"
EOF = "end of input"

_PUNCT_TWO = ("=>",)
_PUNCT_ONE = "{}(),:;?#.=-"
_ESCAPES = {'"': '"', "\\": "\\", "n": "\n", "t": "\t", "r": "\r"}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    value: object
    line: int
    column: int

    def span(self, file: str) -> SourceSpan:
        return SourceSpan(file, self.line, self.column)


def tokenize(text: str, file: str = "<string>") -> list[Token]:
    tokens: list[Token] = []
    i = 0
    line = 1
    col = 1
    n = len(text)

    def err(expected: str, found: str, l: int, c: int):
        raise ParseError(SourceSpan(file, l, c), expected, found)

    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if text.startswith("//", i):
            while i < n and text[i] != "\n":
                i += 1
            continue
        start_line, start_col = line, col
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            tokens.append(Token(IDENT, word, word, start_line, start_col))
            col += j - i
            i = j
            continue
        if ch.isdigit() or (ch == "-" and i + 1 < n and text[i + 1].isdigit()):
            j = i + 1 if ch == "-" else i
            while j < n and text[j].isdigit():
                j += 1
            if j < n and text[j] == "." and j + 1 < n and text[j + 1].isdigit():
                j += 1
                while j < n and text[j].isdigit():
                    j += 1
            if j < n and text[j] in "eE":
                k = j + 1
                if k < n and text[k] in "+-":
                    k += 1
                if k < n and text[k].isdigit():
                    j = k
                    while j < n and text[j].isdigit():
                        j += 1
            word = text[i:j]
            value = float(word)
            if not math.isfinite(value):
                err("a representable number", word, start_line, start_col)
            tokens.append(Token(NUMBER, word, value, start_line, start_col))
            col += j - i
            i = j
            continue
        if ch == '"':
            j = i + 1
            out: list[str] = []
            while True:
                if j >= n or text[j] == "\n":
                    err("closing '\"'", "end of line", start_line, start_col)
                c = text[j]
                if c == '"':
                    j += 1
                    break
                if c == "\\":
                    if j + 1 >= n or text[j + 1] not in _ESCAPES:
                        err("a valid escape sequence", text[j:j + 2], line, col + (j - i))
                    out.append(_ESCAPES[text[j + 1]])
                    j += 2
                    continue
                out.append(c)
                j += 1
            tokens.append(Token(STRING, text[i:j], "".join(out), start_line, start_col))
            col += j - i
            i = j
            continue
        two = text[i:i + 2]
        if two in _PUNCT_TWO:
            tokens.append(Token(PUNCT, two, two, start_line, start_col))
            i += 2
            col += 2
            continue
        if ch in _PUNCT_ONE:
            tokens.append(Token(PUNCT, ch, ch, start_line, start_col))
            i += 1
            col += 1
            continue
        err("a token", repr(ch), start_line, start_col)
    tokens.append(Token(EOF, "", None, line, col))
    return tokens


class Cursor:
    """Sequential token reader with uniform error reporting."""

    def __init__(self, tokens: list[Token], file: str, reserved: frozenset[str]):
        self._tokens = tokens
        self._pos = 0
        self.file = file
        self.reserved = reserved

    def peek(self, ahead: int = 0) -> Token:
        return self._tokens[min(self._pos + ahead, len(self._tokens) - 1)]

    def advance(self) -> Token:
        tok = self.peek()
        if tok.kind != EOF:
            self._pos += 1
        return tok

    def at_end(self) -> bool:
        return self.peek().kind == EOF

    def error(self, expected: str, token: Optional[Token] = None):
        tok = token if token is not None else self.peek()
        found = tok.text if tok.kind != EOF else "end of input"
        raise ParseError(tok.span(self.file), expected, found)

    def at_word(self, word: str) -> bool:
        tok = self.peek()
        return tok.kind == IDENT and tok.text == word

    def accept_word(self, word: str) -> bool:
        if self.at_word(word):
            self.advance()
            return True
        return False

    def expect_word(self, word: str) -> Token:
        if not self.at_word(word):
            self.error(f"'{word}'")
        return self.advance()

    def at_punct(self, mark: str) -> bool:
        tok = self.peek()
        return tok.kind == PUNCT and tok.text == mark

    def accept_punct(self, mark: str) -> bool:
        if self.at_punct(mark):
            self.advance()
            return True
        return False

    def expect_punct(self, mark: str) -> Token:
        if not self.at_punct(mark):
            self.error(f"'{mark}'")
        return self.advance()

    def expect_ident(self, what: str = "an identifier") -> Token:
        tok = self.peek()
        if tok.kind != IDENT:
            self.error(what)
        if tok.text in self.reserved:
            self.error(what, tok)
        return self.advance()

    def expect_any_ident(self, what: str = "an identifier") -> Token:
        tok = self.peek()
        if tok.kind != IDENT:
            self.error(what)
        return self.advance()

    def expect_number(self) -> Token:
        tok = self.peek()
        if tok.kind != NUMBER:
            self.error("a number")
        return self.advance()

    def expect_string(self) -> Token:
        tok = self.peek()
        if tok.kind != STRING:
            self.error("a quoted string")
        return self.advance()

    def parse_qname(self, default_namespace: str, what: str = "a name") -> Name:
        """``[IDENT ":"] IDENT`` -- the default namespace fills in when unqualified."""
        first = self.expect_ident(what)
        if self.at_punct(":"):
            self.advance()
            second = self.expect_any_ident("a local name")
            return Name(first.text, second.text)
        if not is_identifier(default_namespace):
            self.error(f"a qualified name (no valid default namespace)", first)
        return Name(default_namespace, first.text)
