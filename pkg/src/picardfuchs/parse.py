"""Infix parser for polynomials and rational functions.

Accepts variables, parameters, integer literals, + - * / ^ and
parentheses.  Division is only allowed when the divisor is free of the
polynomial variables (so "1/lam" and "3/4" work, "1/x1" does not).
Everything the package prints round-trips through this parser.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .poly import MultiPoly
from .ratfunc import RatFunc


class ParseError(ValueError):
    pass


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            if text[pos:].strip():
                raise ParseError(f"bad character at {text[pos:]!r}")
            break
        num, ident, op = m.groups()
        if num is not None:
            tokens.append(("num", int(num)))
        elif ident is not None:
            tokens.append(("ident", ident))
        else:
            tokens.append(("op", "^" if op == "**" else op))
        pos = m.end()
    tokens.append(("end", None))
    return tokens


class _Parser:
    def __init__(self, tokens, variables, params):
        self.tokens = tokens
        self.i = 0
        self.variables = tuple(variables)
        self.params = tuple(params)

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op):
        kind, val = self.take()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r}, found {val!r}")

    # expr := term (('+'|'-') term)*
    def expr(self):
        kind, val = self.peek()
        negate = False
        if kind == "op" and val in "+-":
            self.take()
            negate = val == "-"
        node = self.term()
        if negate:
            node = -node
        while True:
            kind, val = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                rhs = self.term()
                node = node - rhs if val == "-" else node + rhs
            else:
                return node

    # term := factor (('*'|'/') factor)*
    def term(self):
        node = self.factor()
        while True:
            kind, val = self.peek()
            if kind == "op" and val in "*/":
                self.take()
                rhs = self.factor()
                if val == "*":
                    node = node * rhs
                else:
                    node = self._divide(node, rhs)
            else:
                return node

    def _divide(self, a: MultiPoly, b: MultiPoly) -> MultiPoly:
        if b.is_zero():
            raise ParseError("division by zero")
        if not b.is_constant():
            raise ParseError(
                "division only by parameter/constant expressions")
        inv = b.constant_value()
        if isinstance(inv, RatFunc):
            inv = RatFunc.const(self.params, 1) / inv
        else:
            inv = Fraction(1) / inv
        return a.scale(inv)

    # factor := atom ('^' int)*
    def factor(self):
        node = self.atom()
        while True:
            kind, val = self.peek()
            if kind == "op" and val == "^":
                self.take()
                kind, n = self.take()
                sign = 1
                if kind == "op" and n == "-":
                    sign = -1
                    kind, n = self.take()
                if kind != "num":
                    raise ParseError("exponent must be an integer")
                if sign < 0:
                    one = MultiPoly.const(node.variables, self._one())
                    node = self._divide(one, node ** n)
                else:
                    node = node ** n
            else:
                return node

    def atom(self):
        kind, val = self.take()
        if kind == "num":
            return MultiPoly.const(self.variables, self._lift(Fraction(val)))
        if kind == "ident":
            if val in self.variables:
                return MultiPoly.var(self.variables, val, one=self._one())
            if val in self.params:
                return MultiPoly.const(self.variables,
                                       RatFunc.var(self.params, val))
            raise ParseError(f"unknown name {val!r}")
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        if kind == "op" and val == "-":
            return -self.atom()
        if kind == "op" and val == "+":
            return self.atom()
        raise ParseError(f"unexpected token {val!r}")

    def _one(self):
        return RatFunc.const(self.params, 1) if self.params else Fraction(1)

    def _lift(self, c: Fraction):
        return RatFunc.const(self.params, c) if self.params else c


def parse_poly(text: str, variables, params=()) -> MultiPoly:
    """Parse an infix polynomial over the given variables and parameters."""
    p = _Parser(_tokenize(text), variables, params)
    node = p.expr()
    kind, val = p.take()
    if kind != "end":
        raise ParseError(f"trailing input at {val!r}")
    return node


def parse_ratfunc(text: str, params) -> RatFunc:
    """Parse a rational function purely in the parameters."""
    node = parse_poly(text, (), params)
    c = node.constant_value()
    if isinstance(c, RatFunc):
        return c
    return RatFunc.const(tuple(params), c)
