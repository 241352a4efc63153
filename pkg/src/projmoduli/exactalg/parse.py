"""Expression grammar for exact elements.

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('+' | '-') unary | power
    power  := atom ('^' unary)?          exponent must be an integer constant
    atom   := INTEGER | 'i' | IDENT | '(' expr ')' | 'sqrt' '(' expr ')'

``sqrt(...)`` is only accepted for an expression equal to a declared radicand.
"""

from __future__ import annotations

import re
from typing import List, Mapping, NamedTuple, Sequence

from .poly import MultiPoly
from .ratfunc import RatFunc
from .rootext import RootExtElem
from .scalar import I

RESERVED = {"i", "sqrt"}


class ExprSyntaxError(ValueError):
    def __init__(self, message: str, offset: int, text: str = ""):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset
        self.text = text


class UndeclaredIdentifierError(ExprSyntaxError):
    pass


class _Tok(NamedTuple):
    kind: str
    text: str
    pos: int


_TOKEN_RE = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\S))")


def _tokenize(text: str) -> List[_Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:  # only trailing whitespace left
            break
        if m.group(1):
            toks.append(_Tok("int", m.group(1), m.start(1)))
        elif m.group(2):
            toks.append(_Tok("ident", m.group(2), m.start(2)))
        elif m.group(3):
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise ExprSyntaxError(f"unexpected character {ch!r}", m.start(3), text)
            toks.append(_Tok(ch, ch, m.start(3)))
        pos = m.end()
    toks.append(_Tok("eof", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str, vars: Sequence[str], roots: Mapping[str, MultiPoly]):
        self.text = text
        self.toks = _tokenize(text)
        self.k = 0
        self.vars = tuple(vars)
        self.roots = dict(roots)
        for name in list(self.vars) + list(self.roots):
            if name in RESERVED:
                raise ValueError(f"{name!r} is reserved")

    @property
    def tok(self) -> _Tok:
        return self.toks[self.k]

    def take(self, kind: str) -> _Tok:
        t = self.tok
        if t.kind != kind:
            what = "end of input" if t.kind == "eof" else repr(t.text)
            raise ExprSyntaxError(f"expected {kind!r}, found {what}", t.pos, self.text)
        self.k += 1
        return t

    def parse(self) -> RootExtElem:
        e = self.expr()
        if self.tok.kind != "eof":
            raise ExprSyntaxError(f"unexpected {self.tok.text!r}", self.tok.pos, self.text)
        return e

    def expr(self) -> RootExtElem:
        out = self.term()
        while self.tok.kind in ("+", "-"):
            op = self.take(self.tok.kind).kind
            rhs = self.term()
            out = out + rhs if op == "+" else out - rhs
        return out

    def term(self) -> RootExtElem:
        out = self.unary()
        while self.tok.kind in ("*", "/"):
            t = self.take(self.tok.kind)
            rhs = self.unary()
            if t.kind == "*":
                out = out * rhs
            else:
                if rhs.is_zero():
                    raise ExprSyntaxError("division by zero", t.pos, self.text)
                out = out / rhs
        return out

    def unary(self) -> RootExtElem:
        if self.tok.kind == "-":
            self.take("-")
            return -self.unary()
        if self.tok.kind == "+":
            self.take("+")
            return self.unary()
        return self.power()

    def power(self) -> RootExtElem:
        base = self.atom()
        if self.tok.kind == "^":
            t = self.take("^")
            pos = self.tok.pos
            exponent = self.unary()
            n = _integer_value(exponent)
            if n is None:
                raise ExprSyntaxError("exponent must be an integer constant", pos, self.text)
            if n < 0 and base.is_zero():
                raise ExprSyntaxError("negative power of zero", t.pos, self.text)
            return base ** n
        return base

    def atom(self) -> RootExtElem:
        t = self.tok
        if t.kind == "int":
            self.take("int")
            return RootExtElem.const(int(t.text), self.vars)
        if t.kind == "(":
            self.take("(")
            e = self.expr()
            self.take(")")
            return e
        if t.kind == "ident":
            self.take("ident")
            if t.text == "i":
                return RootExtElem.const(I, self.vars)
            if t.text == "sqrt":
                self.take("(")
                pos = self.tok.pos
                arg = self.expr()
                self.take(")")
                return self._sqrt(arg, pos)
            if t.text in self.vars:
                return RootExtElem.var(t.text, self.vars)
            if t.text in self.roots:
                return RootExtElem.root(t.text, self.roots[t.text])
            raise UndeclaredIdentifierError(f"undeclared identifier {t.text!r}", t.pos, self.text)
        what = "end of input" if t.kind == "eof" else repr(t.text)
        raise ExprSyntaxError(f"unexpected {what}", t.pos, self.text)

    def _sqrt(self, arg: RootExtElem, pos: int) -> RootExtElem:
        if arg.is_root_free():
            r = arg.as_ratfunc()
            if r.is_poly():
                for s, d in self.roots.items():
                    if r.num == d:
                        return RootExtElem.root(s, d)
        raise ExprSyntaxError("sqrt argument is not a declared root polynomial", pos, self.text)


def _integer_value(e: RootExtElem) -> int | None:
    if not e.is_root_free():
        return None
    r = e.as_ratfunc()
    if not r.is_const():
        return None
    v = r.const_value()
    if not v.is_real() or v.re.denominator != 1:
        return None
    return int(v.re)


def parse_expr(text: str, vars: Sequence[str], roots: Mapping[str, MultiPoly | str] | None = None) -> RootExtElem:
    """Parse ``text`` into an exact element over ``vars`` with declared ``roots``.

    Radicands given as strings are parsed (root-free) over ``vars`` first.
    """
    declared = {}
    for s, d in (roots or {}).items():
        if isinstance(d, str):
            d = parse_poly(d, vars)
        declared[s] = d
    return _Parser(text, vars, declared).parse()


def parse_poly(text: str, vars: Sequence[str]) -> MultiPoly:
    e = _Parser(text, vars, {}).parse()
    r = e.as_ratfunc()
    if not r.is_poly():
        raise ValueError(f"{text!r} is not a polynomial")
    return r.num * r.den.const_value().inverse()


def parse_ratfunc(text: str, vars: Sequence[str]) -> RatFunc:
    return _Parser(text, vars, {}).parse().as_ratfunc()


def to_text(e: RootExtElem | RatFunc | MultiPoly) -> str:
    """Canonical text in the same grammar."""
    return e.to_text()
