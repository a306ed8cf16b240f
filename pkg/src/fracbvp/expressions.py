"""Tiny arithmetic expression language for user-supplied nonlinearities.

Grammar over the variables ``t`` and ``u`` (and the constant ``pi``):

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('+' | '-') unary | power
    power  := atom ('^' unary)?          (right-associative)
    atom   := NUMBER | 't' | 'u' | 'pi' | NAME '(' expr (',' expr)* ')'
            | '(' expr ')'

Functions: sin, cos, tan, exp, abs, pow.  Compiled expressions are
numpy-vectorized callables of (t, u).
"""

from __future__ import annotations

import re
from typing import Callable

import numpy as np

from .errors import ConfigurationError

__all__ = ["compile_expression"]

_TOKEN = re.compile(r"\s*(?:(\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?"
                    r"|\d+(?:[eE][+-]?\d+)?)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*)|([-+*/^(),]))")

_FUNCTIONS = {
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "exp": np.exp,
    "abs": np.abs,
    "pow": np.power,
}

_FUNCTION_ARITY = {"sin": 1, "cos": 1, "tan": 1, "exp": 1, "abs": 1, "pow": 2}


def _tokenize(text: str):
    pos = 0
    tokens = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            if text[pos:].strip() == "":
                break
            raise ConfigurationError(
                f"expression syntax error at position {pos}: {text[pos:pos + 10]!r}")
        number, name, dstar, op = m.groups()
        if number is not None:
            tokens.append(("num", float(number)))
        elif name is not None:
            tokens.append(("name", name))
        elif dstar is not None:
            tokens.append(("op", "^"))
        else:
            tokens.append(("op", op))
        pos = m.end()
    tokens.append(("end", ""))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str):
        kind, val = self.take()
        if kind != "op" or val != op:
            raise ConfigurationError(f"expected {op!r} in expression {self.text!r}")

    def parse(self) -> Callable:
        node = self.expr()
        if self.peek()[0] != "end":
            raise ConfigurationError(
                f"unexpected trailing token {self.peek()[1]!r} in expression {self.text!r}")
        return node

    def expr(self):
        node = self.term()
        while self.peek() == ("op", "+") or self.peek() == ("op", "-"):
            op = self.take()[1]
            rhs = self.term()
            node = (lambda a, b: lambda t, u: a(t, u) + b(t, u))(node, rhs) if op == "+" \
                else (lambda a, b: lambda t, u: a(t, u) - b(t, u))(node, rhs)
        return node

    def term(self):
        node = self.unary()
        while self.peek() == ("op", "*") or self.peek() == ("op", "/"):
            op = self.take()[1]
            rhs = self.unary()
            node = (lambda a, b: lambda t, u: a(t, u) * b(t, u))(node, rhs) if op == "*" \
                else (lambda a, b: lambda t, u: a(t, u) / b(t, u))(node, rhs)
        return node

    def unary(self):
        if self.peek() == ("op", "-"):
            self.take()
            inner = self.unary()
            return lambda t, u: -inner(t, u)
        if self.peek() == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            exponent = self.unary()
            return lambda t, u: np.power(base(t, u), exponent(t, u))
        return base

    def atom(self):
        kind, val = self.take()
        if kind == "num":
            const = float(val)
            return lambda t, u: const
        if kind == "name":
            if val == "t":
                return lambda t, u: np.asarray(t, dtype=float)
            if val == "u":
                return lambda t, u: np.asarray(u, dtype=float)
            if val == "pi":
                return lambda t, u: np.pi
            if val in _FUNCTIONS:
                self.expect_op("(")
                args = [self.expr()]
                while self.peek() == ("op", ","):
                    self.take()
                    args.append(self.expr())
                self.expect_op(")")
                if len(args) != _FUNCTION_ARITY[val]:
                    raise ConfigurationError(
                        f"function {val!r} takes {_FUNCTION_ARITY[val]} argument(s)")
                fn = _FUNCTIONS[val]
                if len(args) == 1:
                    a0 = args[0]
                    return lambda t, u: fn(a0(t, u))
                a0, a1 = args
                return lambda t, u: fn(a0(t, u), a1(t, u))
            raise ConfigurationError(f"unknown name {val!r} in expression")
        if kind == "op" and val == "(":
            inner = self.expr()
            self.expect_op(")")
            return inner
        raise ConfigurationError(f"unexpected token {val!r} in expression")


def compile_expression(text: str) -> Callable:
    """Compile an expression of (t, u) into a vectorized callable."""
    if not text or not text.strip():
        raise ConfigurationError("empty expression")
    return _Parser(text).parse()
