"""A small arithmetic expression language for scenario files.

Grammar (whitespace insensitive)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?          # right-associative
    atom   := NUMBER | NAME | NAME '(' expr (',' expr)* ')' | '(' expr ')'

NUMBER is a decimal literal with optional fraction and exponent; NAME is an
identifier.  The callable names and their arities are fixed (sin, cos, exp,
sinh, cosh of one argument; pow of two); anything else followed by '(' is a
syntax error.  Free names are resolved against a coordinate list at bind time.

``parse_expr`` and ``print_expr`` are inverse in the useful direction:
re-parsing a printed tree reproduces it node for node, which is what lets
reports quote expressions canonically.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

from .errors import EvaluationError, ExprSyntaxError, UnknownSymbolError

FUNCTIONS: dict[str, int] = {
    "sin": 1,
    "cos": 1,
    "exp": 1,
    "sinh": 1,
    "cosh": 1,
    "pow": 2,
}

_IMPL = {
    "sin": math.sin,
    "cos": math.cos,
    "exp": math.exp,
    "sinh": math.sinh,
    "cosh": math.cosh,
    "pow": lambda a, b: float(a) ** float(b),
}


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Sym:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class Bin:
    op: str  # one of + - * / ^
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    fn: str
    args: tuple["Expr", ...]


Expr = Union[Num, Sym, Neg, Bin, Call]

_NUM_RE = re.compile(r"\d+(?:\.\d+)?(?:[eE][+-]?\d+)?")
_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")


@dataclass(frozen=True)
class _Token:
    kind: str  # "num" | "name" | "op" | "end"
    text: str
    pos: int
    value: float = 0.0


def _tokenize(src: str) -> list[_Token]:
    toks: list[_Token] = []
    i = 0
    while i < len(src):
        c = src[i]
        if c.isspace():
            i += 1
            continue
        if c.isdigit():
            m = _NUM_RE.match(src, i)
            toks.append(_Token("num", m.group(), i, float(m.group())))
            i = m.end()
            continue
        if c.isalpha() or c == "_":
            m = _NAME_RE.match(src, i)
            toks.append(_Token("name", m.group(), i))
            i = m.end()
            continue
        if c in "+-*/^(),":
            toks.append(_Token("op", c, i))
            i += 1
            continue
        raise ExprSyntaxError(f"unexpected character {c!r}", i)
    toks.append(_Token("end", "", len(src)))
    return toks


class _Parser:
    def __init__(self, src: str):
        self.toks = _tokenize(src)
        self.i = 0

    @property
    def cur(self) -> _Token:
        return self.toks[self.i]

    def _eat_op(self, chars: str) -> _Token | None:
        t = self.cur
        if t.kind == "op" and t.text in chars:
            self.i += 1
            return t
        return None

    def expr(self) -> Expr:
        node = self.term()
        while (t := self._eat_op("+-")) is not None:
            node = Bin(t.text, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.unary()
        while (t := self._eat_op("*/")) is not None:
            node = Bin(t.text, node, self.unary())
        return node

    def unary(self) -> Expr:
        if self._eat_op("-") is not None:
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        node = self.atom()
        if self._eat_op("^") is not None:
            return Bin("^", node, self.unary())
        return node

    def atom(self) -> Expr:
        t = self.cur
        if t.kind == "num":
            self.i += 1
            return Num(t.value)
        if t.kind == "name":
            self.i += 1
            if self._eat_op("(") is None:
                return Sym(t.text)
            if t.text not in FUNCTIONS:
                raise ExprSyntaxError(f"unknown function {t.text!r}", t.pos)
            args = [self.expr()]
            while self._eat_op(",") is not None:
                args.append(self.expr())
            if self._eat_op(")") is None:
                raise ExprSyntaxError("expected ')'", self.cur.pos)
            if len(args) != FUNCTIONS[t.text]:
                raise ExprSyntaxError(
                    f"{t.text} takes {FUNCTIONS[t.text]} argument(s), got {len(args)}",
                    t.pos,
                )
            return Call(t.text, tuple(args))
        if self._eat_op("(") is not None:
            node = self.expr()
            if self._eat_op(")") is None:
                raise ExprSyntaxError("expected ')'", self.cur.pos)
            return node
        raise ExprSyntaxError(
            f"expected a value, found {t.text!r}" if t.kind != "end" else "unexpected end of input",
            t.pos,
        )


def parse_expr(src: str) -> Expr:
    p = _Parser(src)
    node = p.expr()
    if p.cur.kind != "end":
        raise ExprSyntaxError(f"unexpected trailing {p.cur.text!r}", p.cur.pos)
    return node


# Precedence levels used by the printer; parenthesize a child whose level is
# below what its slot requires.
_LEVEL_ADD, _LEVEL_MUL, _LEVEL_NEG, _LEVEL_POW, _LEVEL_ATOM = 1, 2, 3, 4, 5


def _level(e: Expr) -> int:
    if isinstance(e, Bin):
        return {"+": _LEVEL_ADD, "-": _LEVEL_ADD, "*": _LEVEL_MUL, "/": _LEVEL_MUL, "^": _LEVEL_POW}[e.op]
    if isinstance(e, Neg):
        return _LEVEL_NEG
    return _LEVEL_ATOM


def _print(e: Expr, required: int) -> str:
    if isinstance(e, Num):
        s = repr(float(e.value))
        return s
    if isinstance(e, Sym):
        return e.name
    if isinstance(e, Call):
        return f"{e.fn}({', '.join(_print(a, _LEVEL_ADD) for a in e.args)})"
    if isinstance(e, Neg):
        body = f"-{_print(e.arg, _LEVEL_NEG)}"
    elif e.op in "+-":
        body = f"{_print(e.left, _LEVEL_ADD)} {e.op} {_print(e.right, _LEVEL_MUL)}"
    elif e.op in "*/":
        body = f"{_print(e.left, _LEVEL_MUL)}{e.op}{_print(e.right, _LEVEL_NEG)}"
    else:  # ^
        body = f"{_print(e.left, _LEVEL_ATOM)}^{_print(e.right, _LEVEL_NEG)}"
    return f"({body})" if _level(e) < required else body


def print_expr(e: Expr) -> str:
    """Canonical text for a tree; re-parsing it reproduces the tree."""
    return _print(e, _LEVEL_ADD)


def free_symbols(e: Expr) -> set[str]:
    if isinstance(e, Sym):
        return {e.name}
    if isinstance(e, Neg):
        return free_symbols(e.arg)
    if isinstance(e, Bin):
        return free_symbols(e.left) | free_symbols(e.right)
    if isinstance(e, Call):
        out: set[str] = set()
        for a in e.args:
            out |= free_symbols(a)
        return out
    return set()


def bind_expr(e: Expr, names: Sequence[str]) -> Callable[[np.ndarray], float]:
    """Compile to a function of a coordinate vector ordered like ``names``.

    Unknown free names raise UnknownSymbolError here, not at call time.
    Division by zero and non-finite results raise EvaluationError when the
    compiled function runs.
    """
    index = {name: k for k, name in enumerate(names)}

    def compile_node(node: Expr) -> Callable[[np.ndarray], float]:
        if isinstance(node, Num):
            v = float(node.value)
            return lambda c: v
        if isinstance(node, Sym):
            if node.name not in index:
                raise UnknownSymbolError(
                    f"unknown symbol {node.name!r}; coordinates are {tuple(names)}"
                )
            k = index[node.name]
            return lambda c: float(c[k])
        if isinstance(node, Neg):
            f = compile_node(node.arg)
            return lambda c: -f(c)
        if isinstance(node, Call):
            fn = _IMPL[node.fn]
            args = [compile_node(a) for a in node.args]
            if len(args) == 1:
                f0 = args[0]
                return lambda c: _apply(fn, (f0(c),), node)
            f0, f1 = args
            return lambda c: _apply(fn, (f0(c), f1(c)), node)
        left = compile_node(node.left)
        right = compile_node(node.right)
        op = node.op
        if op == "+":
            return lambda c: left(c) + right(c)
        if op == "-":
            return lambda c: left(c) - right(c)
        if op == "*":
            return lambda c: left(c) * right(c)
        if op == "/":

            def divide(c: np.ndarray) -> float:
                d = right(c)
                if d == 0.0:
                    raise EvaluationError(
                        f"division by zero in {print_expr(node)!r}"
                    )
                return _apply(lambda a, b: a / b, (left(c), d), node)

            return divide
        return lambda c: _apply(lambda a, b: a ** b, (left(c), right(c)), node)

    return compile_node(e)


def _apply(fn, args: tuple, node: Expr):
    try:
        v = fn(*args)
    except (ZeroDivisionError, OverflowError, ValueError) as exc:
        raise EvaluationError(f"cannot evaluate {print_expr(node)!r}: {exc}") from exc
    if isinstance(v, complex) or not math.isfinite(v):
        raise EvaluationError(f"non-finite value from {print_expr(node)!r}")
    return float(v)


def evaluate(src: str, names: Sequence[str], coords: np.ndarray) -> float:
    """Parse, bind and evaluate in one step (convenience for one-off use)."""
    return bind_expr(parse_expr(src), names)(np.asarray(coords, dtype=float))
