"""Recursive-descent parser and evaluator for vector-field expressions.

Grammar (highest precedence first):

    power  :=  atom ('^' unary)?          # right-associative
    unary  :=  '-' unary | power
    term   :=  unary (('*' | '/') unary)*
    expr   :=  term (('+' | '-') term)*
    atom   :=  NUMBER | VARIABLE | FUNC '(' expr ')' | '(' expr ')'

so ``-x1^2`` reads as ``-(x1^2)`` and ``x1^x2^x3`` as ``x1^(x2^x3)``.
Variables are ``x1 .. xN``; the only functions are sin, cos, exp, log,
tanh, sqrt and abs.  There are no user parameters: everything else is a
parse error.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .errors import DomainError, ParseError, UnknownVariable

FUNCTIONS = {
    "sin": math.sin,
    "cos": math.cos,
    "exp": math.exp,
    "tanh": math.tanh,
    "abs": abs,
    # log and sqrt are guarded in _call below
}

_GUARDED = {"log", "sqrt"}


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    index: int  # zero-based


@dataclass(frozen=True)
class Neg:
    child: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * / ^
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Node"


Node = Const | Var | Neg | BinOp | Call

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?|\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            if text[pos:].strip() == "":
                break
            raise ParseError(pos, f"unexpected character {text[pos:].lstrip()[0]!r}")
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str, dimension: int):
        self.text = text
        self.dimension = dimension
        self.tokens = _tokenize(text)
        self.k = 0

    def peek(self):
        return self.tokens[self.k] if self.k < len(self.tokens) else (None, None, len(self.text))

    def take(self):
        tok = self.peek()
        self.k += 1
        return tok

    def expect_op(self, op: str):
        kind, val, pos = self.take()
        if kind != "op" or val != op:
            raise ParseError(pos, f"expected {op!r}, got {val!r}")

    def parse(self) -> Node:
        node = self.expr()
        kind, val, pos = self.peek()
        if kind is not None:
            raise ParseError(pos, f"unexpected trailing input {val!r}")
        return node

    def expr(self) -> Node:
        node = self.term()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                node = BinOp(val, node, self.term())
            else:
                return node

    def term(self) -> Node:
        node = self.unary()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "*/":
                self.take()
                node = BinOp(val, node, self.unary())
            else:
                return node

    def unary(self) -> Node:
        kind, val, _ = self.peek()
        if kind == "op" and val == "-":
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.take()
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> Node:
        kind, val, pos = self.take()
        if kind == "num":
            return Const(float(val))
        if kind == "name":
            nxt_kind, nxt_val, _ = self.peek()
            if nxt_kind == "op" and nxt_val == "(":
                if val not in FUNCTIONS and val not in _GUARDED:
                    raise ParseError(pos, f"unknown function {val!r}")
                self.take()
                arg = self.expr()
                self.expect_op(")")
                return Call(val, arg)
            m = re.fullmatch(r"x(\d+)", val)
            if m is None:
                raise UnknownVariable(pos, f"unknown identifier {val!r}")
            idx = int(m.group(1))
            if not 1 <= idx <= self.dimension:
                raise UnknownVariable(
                    pos, f"variable {val} out of range for dimension {self.dimension}")
            return Var(idx - 1)
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        raise ParseError(pos, f"expected a value, got {val!r}")


def parse_expression(text: str, dimension: int) -> Node:
    """Parse one scalar expression over variables x1..x<dimension>."""
    return _Parser(text, dimension).parse()


def _call(func: str, v: float) -> float:
    if func == "log":
        if v <= 0:
            raise DomainError(f"log of non-positive value {v:.6g}")
        return math.log(v)
    if func == "sqrt":
        if v < 0:
            raise DomainError(f"sqrt of negative value {v:.6g}")
        return math.sqrt(v)
    try:
        return FUNCTIONS[func](v)
    except OverflowError as exc:
        raise DomainError(f"{func}({v:.6g}) overflowed") from exc


def evaluate(node: Node, x) -> float:
    """Evaluate a parsed tree at the state vector x.

    Raises DomainError on division by zero, log/sqrt outside their domain,
    or any non-finite intermediate (e.g. exp overflow).
    """
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Var):
        return float(x[node.index])
    if isinstance(node, Neg):
        return -evaluate(node.child, x)
    if isinstance(node, Call):
        return _call(node.func, evaluate(node.arg, x))
    left = evaluate(node.left, x)
    right = evaluate(node.right, x)
    if node.op == "+":
        return left + right
    if node.op == "-":
        return left - right
    if node.op == "*":
        return left * right
    if node.op == "/":
        if right == 0:
            raise DomainError("division by zero")
        return left / right
    # '^'
    try:
        v = math.pow(left, right)
    except (ValueError, OverflowError) as exc:
        raise DomainError(f"{left:.6g} ^ {right:.6g} is undefined") from exc
    if not math.isfinite(v):
        raise DomainError(f"{left:.6g} ^ {right:.6g} overflowed")
    return v


def pretty(node: Node) -> str:
    """Fully parenthesized rendering; reparsing it reproduces the tree."""
    if isinstance(node, Const):
        return repr(node.value)
    if isinstance(node, Var):
        return f"x{node.index + 1}"
    if isinstance(node, Neg):
        return f"(-{pretty(node.child)})"
    if isinstance(node, Call):
        return f"{node.func}({pretty(node.arg)})"
    return f"({pretty(node.left)} {node.op} {pretty(node.right)})"
