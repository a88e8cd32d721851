"""Text syntax for forms.

Grammar::

    expr   := term (('+'|'-') term)*
    term   := factor ('*' factor)*
    factor := base ('^' nat)?
    base   := int | ident | '(' expr ')'

A leading sign is allowed on any term.  Juxtaposition (``2x``) is rejected.
"""
from __future__ import annotations

import re
from typing import Sequence

from .errors import FormSyntaxError, ZeroFormError
from .forms import Form, poly_add, poly_mul, poly_pow

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\S))")
_INDEXED = re.compile(r"^x(\d+)$")


def default_variables(n: int) -> list[str]:
    if n == 2:
        return ["x", "y"]
    if n == 3:
        return ["x", "y", "z"]
    return [f"x{i}" for i in range(1, n + 1)]


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        if m.end() == pos:
            break
        num, ident, sym = m.groups()
        start = m.start(m.lastindex)
        if num is not None:
            tokens.append(("int", int(num), start))
        elif ident is not None:
            tokens.append(("ident", ident, start))
        else:
            if sym not in "+-*^()":
                raise FormSyntaxError(f"unexpected character {sym!r}", start)
            tokens.append((sym, sym, start))
        pos = m.end()
    tokens.append(("end", None, len(text)))
    return tokens


class _Parser:
    def __init__(self, text, variables):
        self.tokens = _tokenize(text)
        self.i = 0
        self.vars = {v: k for k, v in enumerate(variables)}
        self.n = len(variables)

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind=None):
        tok = self.tokens[self.i]
        if kind is not None and tok[0] != kind:
            raise FormSyntaxError(f"expected {kind!r} but found {tok[1] if tok[1] is not None else 'end of input'!r}", tok[2])
        self.i += 1
        return tok

    def const(self, c):
        return {(0,) * self.n: c} if c else {}

    def parse(self):
        p = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            if tok[0] in ("int", "ident", "("):
                raise FormSyntaxError("implicit multiplication is not allowed; use '*'", tok[2])
            raise FormSyntaxError(f"unexpected {tok[1]!r}", tok[2])
        return p

    def expr(self):
        sign = 1
        if self.peek()[0] in "+-":
            sign = -1 if self.take()[0] == "-" else 1
        acc = poly_add({}, self.term(), sign)
        while self.peek()[0] in ("+", "-"):
            sign = -1 if self.take()[0] == "-" else 1
            acc = poly_add(acc, self.term(), sign)
        return acc

    def term(self):
        acc = self.factor()
        while self.peek()[0] == "*":
            self.take()
            acc = poly_mul(acc, self.factor())
        return acc

    def factor(self):
        base = self.base()
        if self.peek()[0] == "^":
            self.take()
            tok = self.peek()
            if tok[0] != "int":
                raise FormSyntaxError("exponent must be a non-negative integer", tok[2])
            self.take()
            return poly_pow(base, tok[1], self.n)
        return base

    def base(self):
        tok = self.peek()
        if tok[0] == "int":
            self.take()
            return self.const(tok[1])
        if tok[0] == "ident":
            self.take()
            if tok[1] not in self.vars:
                raise FormSyntaxError(f"unknown variable {tok[1]!r}", tok[2])
            e = [0] * self.n
            e[self.vars[tok[1]]] = 1
            return {tuple(e): 1}
        if tok[0] == "(":
            self.take()
            inner = self.expr()
            self.take(")")
            return inner
        if tok[0] in "+-":
            # signed factor such as 2*-3 or (-x)
            self.take()
            inner = self.factor()
            return poly_add({}, inner, -1 if tok[0] == "-" else 1)
        raise FormSyntaxError(
            "unexpected end of input" if tok[0] == "end" else f"unexpected {tok[1]!r}", tok[2])


def infer_variables(text: str) -> list[str]:
    names = {tok[1] for tok in _tokenize(text) if tok[0] == "ident"}
    if names <= {"x", "y"}:
        return ["x", "y"]
    if names <= {"x", "y", "z"}:
        return ["x", "y", "z"]
    indexed = [_INDEXED.match(v) for v in names]
    if all(indexed):
        n = max(2, max(int(m.group(1)) for m in indexed))
        return [f"x{i}" for i in range(1, n + 1)]
    return sorted(names)


def parse_polynomial(text: str, variables: Sequence[str]) -> dict:
    """Parse an arbitrary (not necessarily homogeneous) integer polynomial."""
    return _Parser(text, list(variables)).parse()


def parse_form(text: str, variables: Sequence[str] | None = None) -> Form:
    if variables is None:
        variables = infer_variables(text)
    variables = list(variables)
    if len(set(variables)) != len(variables):
        raise ValueError("variable names must be distinct")
    coeffs = parse_polynomial(text, variables)
    if not coeffs:
        raise ZeroFormError(f"{text!r} is the zero polynomial")
    return Form.from_dict(coeffs, n=len(variables))


def _monomial(exp, names):
    parts = []
    for name, e in zip(names, exp):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def render_form(F: Form, variables: Sequence[str] | None = None) -> str:
    names = list(variables) if variables is not None else default_variables(F.n)
    out = []
    for k, (exp, c) in enumerate(F.terms):
        mono = _monomial(exp, names)
        mag = abs(c)
        if mono:
            body = mono if mag == 1 else f"{mag}*{mono}"
        else:
            body = str(mag)
        if k == 0:
            out.append(("-" if c < 0 else "") + body)
        else:
            out.append((" - " if c < 0 else " + ") + body)
    return "".join(out)
