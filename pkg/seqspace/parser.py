"""Tokenizer and recursive descent parser for the expression DSL.

Grammar (loosest first)::

    expr  := term (("+" | "-") term)*
    term  := unary (("*" | "/") unary)*
    unary := "-" unary | power
    power := atom ("^" unary)?
    atom  := NUMBER | IDENT | IDENT "(" expr ("," expr)* ")" | "(" expr ")"

so ^ binds tighter than unary minus and is right associative.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import List

from .errors import EmptyInput, ExprSyntaxError, UnbalancedParen, UnknownIdentifier
from .expr import FUNCTIONS, UNARY_FUNCS, VARIABLES, BinOp, Call, Expr, Neg, Num, Var

_ALIASES = {"×": "*", "÷": "/", "−": "-", "**": "^"}
_TOKEN_RE = re.compile(
    r"\s*(?:(?P<number>\d+(?:\.\d*)?|\.\d+)|(?P<ident>[A-Za-z_]\w*)|(?P<op>\*\*|[-+*/^(),×÷−]))"
)


@dataclass(frozen=True)
class Token:
    kind: str  # number | ident | op | eof
    text: str
    offset: int  # byte offset into the UTF-8 source


def tokenize(text: str) -> List[Token]:
    tokens: List[Token] = []
    pos = 0
    byte_pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            rest = text[pos:]
            stripped = rest.lstrip()
            if not stripped:
                break
            skipped = len(rest) - len(stripped)
            offset = byte_pos + len(rest[:skipped].encode("utf-8"))
            raise ExprSyntaxError(f"unexpected character {stripped[0]!r}", offset)
        kind = m.lastgroup or "op"
        value = m.group(kind)
        start = m.start(kind)
        offset = byte_pos + len(text[pos:start].encode("utf-8"))
        if kind == "op":
            value = _ALIASES.get(value, value)
        tokens.append(Token(kind, value, offset))
        byte_pos += len(text[pos : m.end()].encode("utf-8"))
        pos = m.end()
    tokens.append(Token("eof", "", len(text.encode("utf-8"))))
    return tokens


class _Parser:
    def __init__(self, tokens: List[Token]):
        self.tokens = tokens
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def accept(self, *ops: str) -> Token | None:
        if self.tok.kind == "op" and self.tok.text in ops:
            return self.advance()
        return None

    def parse(self) -> Expr:
        if self.tok.kind == "eof":
            raise EmptyInput(self.tok.offset)
        e = self.expr()
        if self.tok.kind != "eof":
            if self.tok.text == ")":
                raise UnbalancedParen("unmatched ')'", self.tok.offset)
            raise ExprSyntaxError(f"unexpected {self.tok.text!r}", self.tok.offset)
        return e

    def expr(self) -> Expr:
        e = self.term()
        while (op := self.accept("+", "-")) is not None:
            e = BinOp(op.text, e, self.term())
        return e

    def term(self) -> Expr:
        e = self.unary()
        while (op := self.accept("*", "/")) is not None:
            e = BinOp(op.text, e, self.unary())
        return e

    def unary(self) -> Expr:
        if self.accept("-"):
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.accept("^"):
            return BinOp("^", base, self.unary())
        return base

    def _close(self, opener: Token) -> None:
        if self.accept(")") is None:
            raise UnbalancedParen("missing ')'", opener.offset)

    def atom(self) -> Expr:
        tok = self.tok
        if tok.kind == "number":
            self.advance()
            return Num(Fraction(tok.text if not tok.text.endswith(".") else tok.text[:-1]))
        if tok.kind == "ident":
            self.advance()
            if tok.text in VARIABLES:
                return Var(tok.text)
            if tok.text not in FUNCTIONS:
                raise UnknownIdentifier(tok.text, tok.offset)
            opener = self.accept("(")
            if opener is None:
                raise ExprSyntaxError(f"expected '(' after {tok.text}", self.tok.offset)
            args = [self.expr()]
            while self.accept(","):
                args.append(self.expr())
            self._close(opener)
            if tok.text in UNARY_FUNCS and len(args) != 1:
                raise ExprSyntaxError(f"{tok.text} takes one argument", tok.offset)
            if tok.text not in UNARY_FUNCS and len(args) < 2:
                raise ExprSyntaxError(f"{tok.text} takes at least two arguments", tok.offset)
            return Call(tok.text, tuple(args))
        if tok.kind == "op" and tok.text == "(":
            self.advance()
            e = self.expr()
            self._close(tok)
            return e
        if tok.kind == "eof":
            if any(t.text == "(" for t in self.tokens[: self.i]):
                raise UnbalancedParen("missing ')'", tok.offset)
            raise ExprSyntaxError("unexpected end of input", tok.offset)
        if tok.text == ")":
            raise UnbalancedParen("unmatched ')'", tok.offset)
        raise ExprSyntaxError(f"unexpected {tok.text!r}", tok.offset)


def parse_expr(text: str) -> Expr:
    """Parse DSL text into an expression tree, reporting errors with byte offsets."""
    return _Parser(tokenize(text)).parse()
