"""Tiny expression language for time-dependent coefficients.

Grammar (whitespace insignificant)::

    expr    := term (('+' | '-') term)*
    term    := factor (('*' | '/') factor)*
    factor  := '-' factor | primary
    primary := number | 't' | 'pi' | func '(' expr ')' | '(' expr ')'
    func    := 'sin' | 'cos' | 'tan' | 'exp' | 'sqrt'

Expressions are parsed into immutable trees, evaluated either at a scalar
time or on a numpy array of times, and differentiated symbolically.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ParseError

FUNCTIONS = ("sin", "cos", "tan", "exp", "sqrt")


class Node:
    """Base class of expression tree nodes."""

    __slots__ = ()

    def __str__(self):
        return to_string(self)


@dataclass(frozen=True)
class Const(Node):
    value: float


@dataclass(frozen=True)
class Var(Node):
    """The time variable ``t``."""


@dataclass(frozen=True)
class Add(Node):
    left: Node
    right: Node


@dataclass(frozen=True)
class Sub(Node):
    left: Node
    right: Node


@dataclass(frozen=True)
class Mul(Node):
    left: Node
    right: Node


@dataclass(frozen=True)
class Div(Node):
    left: Node
    right: Node


@dataclass(frozen=True)
class Neg(Node):
    arg: Node


@dataclass(frozen=True)
class Call(Node):
    name: str
    arg: Node


ZERO = Const(0.0)
ONE = Const(1.0)
T = Var()

_BINARY = {Add: "+", Sub: "-", Mul: "*", Div: "/"}


# -- parsing ------------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/()])
    """,
    re.VERBOSE,
)


class _Parser:
    def __init__(self, source: str):
        self.source = source
        self.tokens = []  # (kind, text, char_offset)
        pos = 0
        while pos < len(source):
            m = _TOKEN.match(source, pos)
            if m is None:
                raise ParseError(
                    f"unexpected character {source[pos]!r}",
                    self._byte(pos),
                    "number, name, operator or parenthesis",
                )
            if m.lastgroup != "ws":
                self.tokens.append((m.lastgroup, m.group(), pos))
            pos = m.end()
        self.i = 0

    def _byte(self, char_offset):
        return len(self.source[:char_offset].encode("utf-8"))

    def _peek(self):
        if self.i < len(self.tokens):
            return self.tokens[self.i]
        return ("end", "", len(self.source))

    def _fail(self, expected):
        kind, text, pos = self._peek()
        got = "end of input" if kind == "end" else repr(text)
        raise ParseError(f"expected {expected}, got {got}", self._byte(pos), expected)

    def _accept(self, text):
        kind, tok, _ = self._peek()
        if kind == "op" and tok == text:
            self.i += 1
            return True
        return False

    def parse(self):
        if not self.tokens:
            self._fail("expression")
        node = self.expr()
        if self._peek()[0] != "end":
            self._fail("operator or end of input")
        return node

    def expr(self):
        node = self.term()
        while True:
            if self._accept("+"):
                node = Add(node, self.term())
            elif self._accept("-"):
                node = Sub(node, self.term())
            else:
                return node

    def term(self):
        node = self.factor()
        while True:
            if self._accept("*"):
                node = Mul(node, self.factor())
            elif self._accept("/"):
                node = Div(node, self.factor())
            else:
                return node

    def factor(self):
        if self._accept("-"):
            return Neg(self.factor())
        return self.primary()

    def primary(self):
        kind, text, _ = self._peek()
        if kind == "num":
            self.i += 1
            return Const(float(text))
        if kind == "name":
            if text == "t":
                self.i += 1
                return T
            if text == "pi":
                self.i += 1
                return Const(math.pi)
            if text in FUNCTIONS:
                self.i += 1
                if not self._accept("("):
                    self._fail("'('")
                arg = self.expr()
                if not self._accept(")"):
                    self._fail("')'")
                return Call(text, arg)
            self._fail("'t', 'pi' or one of " + ", ".join(FUNCTIONS))
        if self._accept("("):
            node = self.expr()
            if not self._accept(")"):
                self._fail("')'")
            return node
        self._fail("number, 't', 'pi', function call or '('")


def parse(source: str) -> Node:
    """Parse ``source`` into an expression tree.

    Raises
    ------
    ParseError
        With the UTF-8 byte offset of the offending token.
    """
    return _Parser(source).parse()


def to_string(node: Node) -> str:
    """Render a tree as fully parenthesized text that re-parses to the same tree."""
    if isinstance(node, Const):
        if node.value < 0 or math.copysign(1.0, node.value) < 0:
            return f"(-{-node.value!r})"
        return repr(node.value)
    if isinstance(node, Var):
        return "t"
    if isinstance(node, Neg):
        return f"(-{to_string(node.arg)})"
    if isinstance(node, Call):
        return f"{node.name}({to_string(node.arg)})"
    op = _BINARY[type(node)]
    return f"({to_string(node.left)} {op} {to_string(node.right)})"


# -- evaluation ---------------------------------------------------------------


def _source(node, lib):
    if isinstance(node, Const):
        return repr(float(node.value))
    if isinstance(node, Var):
        return "t"
    if isinstance(node, Neg):
        return f"(-{_source(node.arg, lib)})"
    if isinstance(node, Call):
        return f"{lib}.{node.name}({_source(node.arg, lib)})"
    op = _BINARY[type(node)]
    return f"({_source(node.left, lib)} {op} {_source(node.right, lib)})"


def compile_expr(node: Node):
    """Return a fast callable ``f(t)`` equivalent to :func:`evaluate`."""
    scalar = eval(f"lambda t: {_source(node, 'math')}", {"math": math})
    vector = eval(f"lambda t: {_source(node, 'np')}", {"np": np})

    def f(t):
        if np.ndim(t) == 0:
            try:
                value = scalar(float(t))
            except (ZeroDivisionError, ValueError, OverflowError) as exc:
                raise DomainError(f"{to_string(node)} undefined at t={t!r}: {exc}") from None
            if not math.isfinite(value):
                raise DomainError(f"{to_string(node)} is not finite at t={t!r}")
            return value
        t = np.asarray(t, dtype=float)
        with np.errstate(all="ignore"):
            value = vector(t)
        value = np.broadcast_to(np.asarray(value, dtype=float), t.shape)
        if not np.all(np.isfinite(value)):
            bad = t[~np.isfinite(value)][0]
            raise DomainError(f"{to_string(node)} is not finite at t={bad!r}")
        return np.array(value)

    f.node = node
    f.raw = scalar
    return f


def evaluate(node: Node, t):
    """Evaluate ``node`` at time ``t`` (float or ndarray).

    Raises
    ------
    DomainError
        On division by zero, square root of a negative number or any
        non-finite result.
    """
    return compile_expr(node)(t)


# -- differentiation ----------------------------------------------------------


def differentiate(node: Node) -> Node:
    """Symbolic d/dt. The result is not simplified."""
    if isinstance(node, Const):
        return ZERO
    if isinstance(node, Var):
        return ONE
    if isinstance(node, Neg):
        return Neg(differentiate(node.arg))
    if isinstance(node, Add):
        return Add(differentiate(node.left), differentiate(node.right))
    if isinstance(node, Sub):
        return Sub(differentiate(node.left), differentiate(node.right))
    if isinstance(node, Mul):
        u, v = node.left, node.right
        return Add(Mul(differentiate(u), v), Mul(u, differentiate(v)))
    if isinstance(node, Div):
        u, v = node.left, node.right
        return Div(Sub(Mul(differentiate(u), v), Mul(u, differentiate(v))), Mul(v, v))
    if isinstance(node, Call):
        u = node.arg
        du = differentiate(u)
        if node.name == "sin":
            return Mul(Call("cos", u), du)
        if node.name == "cos":
            return Mul(Neg(Call("sin", u)), du)
        if node.name == "tan":
            return Div(du, Mul(Call("cos", u), Call("cos", u)))
        if node.name == "exp":
            return Mul(Call("exp", u), du)
        if node.name == "sqrt":
            return Div(du, Mul(Const(2.0), Call("sqrt", u)))
    raise TypeError(f"not an expression node: {node!r}")


def is_zero(node: Node) -> bool:
    """True when the tree is the literal constant 0 (no algebraic simplification)."""
    return isinstance(node, Const) and node.value == 0.0


def is_constant(node: Node) -> bool:
    """True when the tree does not reference ``t``."""
    if isinstance(node, Var):
        return False
    if isinstance(node, Const):
        return True
    if isinstance(node, (Neg, Call)):
        return is_constant(node.arg)
    return is_constant(node.left) and is_constant(node.right)
