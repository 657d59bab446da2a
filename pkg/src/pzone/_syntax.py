"""Tokenizer and linear-expression reader shared by the model and constraint parsers."""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction


class SyntaxProblem(ValueError):
    """Raised for malformed input text; carries a 1-based line and column."""

    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.message = message
        self.line = line
        self.col = col
        where = f"line {line}, column {col}: " if line else ""
        super().__init__(where + message)


@dataclass(frozen=True)
class Token:
    kind: str  # 'num', 'ident', 'op', 'eof'
    text: str
    line: int
    col: int


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<num>\d+(?:\.\d+)?(?:/\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<op><=|>=|==|&&|[<>=&+\-*,;:{}\[\]()])
    """,
    re.VERBOSE,
)


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise SyntaxProblem(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        col = pos - line_start + 1
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind in ("num", "ident", "op"):
            tokens.append(Token(kind, m.group(), line, col))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


def parse_number(text: str) -> Fraction:
    return Fraction(text)


RELATIONS = ("<", "<=", "=", "==", ">=", ">")


class TokenStream:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self, offset: int = 0) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.peek()
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def at(self, *texts: str) -> bool:
        tok = self.peek()
        return tok.kind in ("op", "ident") and tok.text in texts

    def accept(self, *texts: str) -> Token | None:
        if self.at(*texts):
            return self.next()
        return None

    def expect(self, text: str) -> Token:
        tok = self.peek()
        if tok.kind in ("op", "ident") and tok.text == text:
            return self.next()
        raise self.error(f"expected {text!r}, found {describe(tok)}", tok)

    def expect_ident(self, what: str = "identifier") -> Token:
        tok = self.peek()
        if tok.kind != "ident":
            raise self.error(f"expected {what}, found {describe(tok)}", tok)
        return self.next()

    @staticmethod
    def error(message: str, tok: Token) -> SyntaxProblem:
        return SyntaxProblem(message, tok.line, tok.col)


def describe(tok: Token) -> str:
    return "end of input" if tok.kind == "eof" else repr(tok.text)


@dataclass
class LinearForm:
    """Sum of name*coefficient terms plus a constant, as read from text."""

    terms: dict[str, Fraction]
    constant: Fraction
    # first token of each identifier, for error reporting
    where: dict[str, Token]

    def __sub__(self, other: "LinearForm") -> "LinearForm":
        terms = dict(self.terms)
        for name, coef in other.terms.items():
            terms[name] = terms.get(name, Fraction(0)) - coef
        where = {**other.where, **self.where}
        return LinearForm({k: v for k, v in terms.items() if v}, self.constant - other.constant, where)


def parse_linear(ts: TokenStream) -> LinearForm:
    """Read ``term (('+'|'-') term)*`` where a term is ``[num ['*']] ident`` or ``num``."""
    terms: dict[str, Fraction] = {}
    where: dict[str, Token] = {}
    constant = Fraction(0)
    sign = 1
    if ts.accept("-"):
        sign = -1
    elif ts.accept("+"):
        pass
    while True:
        tok = ts.peek()
        if tok.kind == "num":
            ts.next()
            value = parse_number(tok.text)
            if ts.accept("*") or ts.peek().kind == "ident" and not ts.at(*_KEYWORDS):
                name_tok = ts.expect_ident("variable after coefficient")
                terms[name_tok.text] = terms.get(name_tok.text, Fraction(0)) + sign * value
                where.setdefault(name_tok.text, name_tok)
            else:
                constant += sign * value
        elif tok.kind == "ident" and tok.text not in _KEYWORDS:
            ts.next()
            terms[tok.text] = terms.get(tok.text, Fraction(0)) + sign
            where.setdefault(tok.text, tok)
        else:
            raise ts.error(f"expected a number or variable, found {describe(tok)}", tok)
        if ts.accept("+"):
            sign = 1
        elif ts.accept("-"):
            sign = -1
        else:
            break
    return LinearForm({k: v for k, v in terms.items() if v}, constant, where)


# identifiers that end an expression in the model grammar
_KEYWORDS = frozenset({"goto", "reset", "when", "and", "in", "true"})


def parse_comparison_chain(ts: TokenStream) -> list[tuple[LinearForm, str, LinearForm, Token]]:
    """Read ``e1 rel e2 [rel e3 ...]`` and return pairwise comparisons."""
    out = []
    left = parse_linear(ts)
    tok = ts.peek()
    if not (tok.kind == "op" and tok.text in RELATIONS):
        raise ts.error(f"expected a comparison operator, found {describe(tok)}", tok)
    while tok.kind == "op" and tok.text in RELATIONS:
        ts.next()
        right = parse_linear(ts)
        rel = "=" if tok.text == "==" else tok.text
        out.append((left, rel, right, tok))
        left = right
        tok = ts.peek()
    return out
