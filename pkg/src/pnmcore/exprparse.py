"""Tiny expression language for scalar functions of time.

Grammar (one variable ``t``, fixed function set):

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?          # right-associative
    atom   := number | 't' | name '(' expr ')' | '(' expr ')'

Unary minus binds looser than '^', so "-2^2" evaluates to -4.
Evaluation is numpy-based and works elementwise on arrays of t values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import ExprSyntaxError, NonFiniteResult, UnbalancedParens, UnknownFunction

FUNCTIONS = {
    "exp": np.exp,
    "log": np.log,
    "sin": np.sin,
    "cos": np.cos,
    "cosh": np.cosh,
    "sinh": np.sinh,
    "tanh": np.tanh,
    "sqrt": np.sqrt,
    "abs": np.abs,
}

DERIV_STEP = 1e-6


@dataclass(frozen=True)
class Number:
    value: float


@dataclass(frozen=True)
class Variable:
    pass


@dataclass(frozen=True)
class Unary:
    operand: "ExprAst"


@dataclass(frozen=True)
class Binary:
    op: str  # one of + - * / ^
    left: "ExprAst"
    right: "ExprAst"


@dataclass(frozen=True)
class Call:
    name: str
    argument: "ExprAst"


ExprAst = Union[Number, Variable, Unary, Binary, Call]


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message):
        raise ExprSyntaxError(message, self.pos)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self) -> str:
        c = self.peek()
        self.pos += 1
        return c

    def parse(self) -> ExprAst:
        node = self.expr()
        if self.peek():
            if self.peek() == ")":
                raise UnbalancedParens("unmatched ')'", self.pos)
            self.error(f"unexpected character {self.peek()!r}")
        return node

    def expr(self) -> ExprAst:
        node = self.term()
        while self.peek() and self.peek() in "+-":
            op = self.take()
            node = Binary(op, node, self.term())
        return node

    def term(self) -> ExprAst:
        node = self.unary()
        while self.peek() and self.peek() in "*/":
            op = self.take()
            node = Binary(op, node, self.unary())
        return node

    def unary(self) -> ExprAst:
        if self.peek() == "-":
            self.take()
            return Unary(self.unary())
        return self.power()

    def power(self) -> ExprAst:
        node = self.atom()
        if self.peek() == "^":
            self.take()
            node = Binary("^", node, self.unary())
        return node

    def atom(self) -> ExprAst:
        c = self.peek()
        if c == "(":
            start = self.pos
            self.take()
            node = self.expr()
            if self.peek() != ")":
                raise UnbalancedParens("missing ')'", start)
            self.take()
            return node
        if c.isdigit() or c == ".":
            return self.number()
        if c.isalpha():
            return self.name()
        if not c:
            self.error("unexpected end of expression")
        self.error(f"unexpected character {c!r}")

    def number(self) -> Number:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and (self.text[self.pos].isdigit() or self.text[self.pos] == "."):
            self.pos += 1
        # allow scientific notation
        if self.pos < len(self.text) and self.text[self.pos] in "eE":
            mark = self.pos
            self.pos += 1
            if self.pos < len(self.text) and self.text[self.pos] in "+-":
                self.pos += 1
            if self.pos < len(self.text) and self.text[self.pos].isdigit():
                while self.pos < len(self.text) and self.text[self.pos].isdigit():
                    self.pos += 1
            else:
                self.pos = mark
        try:
            return Number(float(self.text[start : self.pos]))
        except ValueError:
            raise ExprSyntaxError(f"bad number {self.text[start:self.pos]!r}", start)

    def name(self) -> ExprAst:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isalpha():
            self.pos += 1
        word = self.text[start : self.pos]
        if word == "t":
            return Variable()
        if self.peek() != "(":
            if word in FUNCTIONS:
                raise ExprSyntaxError(f"function {word!r} needs an argument", start)
            raise UnknownFunction(f"unknown name {word!r}", start)
        if word not in FUNCTIONS:
            raise UnknownFunction(f"unknown function {word!r}", start)
        self.take()
        arg = self.expr()
        if self.peek() != ")":
            raise UnbalancedParens("missing ')'", start)
        self.take()
        return Call(word, arg)


def parse_expr(text: str) -> ExprAst:
    if not text or not text.strip():
        raise ExprSyntaxError("empty expression", 0)
    if not text.isascii():
        raise ExprSyntaxError("expression must be ASCII", 0)
    return _Parser(text).parse()


def eval_ast(node: ExprAst, t):
    """Evaluate at a scalar or ndarray t. Non-finite values propagate."""
    with np.errstate(all="ignore"):
        return _eval(node, t)


def _eval(node: ExprAst, t):
    if isinstance(node, Number):
        return node.value if np.isscalar(t) else np.full(np.shape(t), node.value)
    if isinstance(node, Variable):
        return t
    if isinstance(node, Unary):
        return -_eval(node.operand, t)
    if isinstance(node, Binary):
        left = _eval(node.left, t)
        right = _eval(node.right, t)
        if node.op == "+":
            return left + right
        if node.op == "-":
            return left - right
        if node.op == "*":
            return left * right
        if node.op == "/":
            return np.divide(left, right)
        return np.power(np.float64(left) if np.isscalar(left) else left, right)
    return FUNCTIONS[node.name](np.float64(0.0) + _eval(node.argument, t))


@dataclass(frozen=True)
class ScalarFn:
    """A parsed scalar function of t."""

    ast: ExprAst
    source: str = ""

    @classmethod
    def parse(cls, text: str) -> "ScalarFn":
        return cls(parse_expr(text), text)

    @classmethod
    def constant(cls, value: float) -> "ScalarFn":
        return cls(Number(float(value)), repr(float(value)))

    def __call__(self, t):
        return eval_ast(self.ast, t)

    def eval_finite(self, t) -> float:
        v = float(eval_ast(self.ast, float(t)))
        if not math.isfinite(v):
            raise NonFiniteResult(f"{self.source or 'expression'} is not finite at t={t}")
        return v

    def shifted_normalized(self, shift: float, scale: float) -> "ScalarFn":
        """The function t -> f(t + shift) / scale, as a new AST."""
        shifted = _substitute(self.ast, Binary("+", Variable(), Number(float(shift))))
        return ScalarFn(
            Binary("/", shifted, Number(float(scale))),
            f"({self.source})(t+{shift:g})/{scale:g}" if self.source else "",
        )


def _substitute(node: ExprAst, replacement: ExprAst) -> ExprAst:
    if isinstance(node, Variable):
        return replacement
    if isinstance(node, Unary):
        return Unary(_substitute(node.operand, replacement))
    if isinstance(node, Binary):
        return Binary(node.op, _substitute(node.left, replacement), _substitute(node.right, replacement))
    if isinstance(node, Call):
        return Call(node.name, _substitute(node.argument, replacement))
    return node


def eval_expr(f: ScalarFn, t: float) -> float:
    return float(eval_ast(f.ast, float(t)))


def numeric_derivative(f: ScalarFn, t: float, h: float = DERIV_STEP) -> float:
    """Central difference, O(h^2) error."""
    d = (eval_expr(f, t + h) - eval_expr(f, t - h)) / (2 * h)
    if not math.isfinite(d):
        raise NonFiniteResult(f"derivative not finite at t={t}")
    return d
