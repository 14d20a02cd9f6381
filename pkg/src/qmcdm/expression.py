"""Arithmetic formula language for free-form aggregation nodes.

Grammar (usual precedence, left-to-right associativity):

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | atom
    atom    := NUMBER | IDENT | IDENT '(' expr (',' expr)* ')' | '(' expr ')'

IDENT references a direct-child attribute id ([A-Za-z_][A-Za-z0-9_]*)
unless it names one of the built-in functions min, max, avg. Division by
a literal zero is rejected at parse time; division by a computed zero
fails at evaluation time.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Mapping, Union

FUNCTIONS = ("min", "max", "avg")


class ExpressionError(ValueError):
    pass


class ExpressionSyntaxError(ExpressionError):
    def __init__(self, message: str, position: int):
        self.position = position
        super().__init__(f"{message} (column {position + 1})")


class ExpressionEvalError(ExpressionError):
    pass


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Literal:
    value: float


@dataclass(frozen=True)
class Ref:
    name: str


@dataclass(frozen=True)
class Unary:
    op: str
    operand: "Expression"


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expression"
    right: "Expression"


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple["Expression", ...]


Expression = Union[Literal, Ref, Unary, Binary, Call]


# ---------------------------------------------------------------------------
# Tokenizer
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*/(),])
    """,
    re.VERBOSE,
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ExpressionSyntaxError(f"unexpected character {text[pos]!r}", pos)
        if m.lastgroup != "ws":
            tokens.append((m.lastgroup, m.group(), pos))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.index = 0

    def peek(self):
        return self.tokens[self.index]

    def advance(self):
        tok = self.tokens[self.index]
        self.index += 1
        return tok

    def expect(self, value: str):
        kind, text, pos = self.peek()
        if text != value:
            shown = text if kind != "eof" else "end of input"
            raise ExpressionSyntaxError(f"expected {value!r}, found {shown!r}", pos)
        return self.advance()

    def parse(self) -> Expression:
        expr = self.expr()
        kind, text, pos = self.peek()
        if kind != "eof":
            raise ExpressionSyntaxError(f"unexpected trailing {text!r}", pos)
        return expr

    def expr(self) -> Expression:
        node = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.advance()[1]
            node = Binary(op, node, self.term())
        return node

    def term(self) -> Expression:
        node = self.unary()
        while self.peek()[1] in ("*", "/"):
            _, op, pos = self.advance()
            right = self.unary()
            if op == "/" and isinstance(right, Literal) and right.value == 0.0:
                raise ExpressionSyntaxError("division by literal zero", pos)
            node = Binary(op, node, right)
        return node

    def unary(self) -> Expression:
        kind, text, _ = self.peek()
        if text == "-":
            self.advance()
            return Unary("-", self.unary())
        return self.atom()

    def atom(self) -> Expression:
        kind, text, pos = self.advance()
        if kind == "number":
            return Literal(float(text))
        if kind == "ident":
            if self.peek()[1] == "(":
                if text not in FUNCTIONS:
                    raise ExpressionSyntaxError(f"unknown function {text!r}", pos)
                self.advance()
                args = [self.expr()]
                while self.peek()[1] == ",":
                    self.advance()
                    args.append(self.expr())
                self.expect(")")
                return Call(text, tuple(args))
            if text in FUNCTIONS:
                raise ExpressionSyntaxError(f"{text!r} is a function, expected a call", pos)
            return Ref(text)
        if text == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        shown = text if kind != "eof" else "end of input"
        raise ExpressionSyntaxError(f"expected a value, found {shown!r}", pos)


def parse_expression(text: str) -> Expression:
    """Parse a formula; raises ExpressionSyntaxError with a column on any
    malformed input, never anything else."""
    if not isinstance(text, str):
        raise ExpressionSyntaxError("formula must be a string", 0)
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# Evaluation, printing, analysis
# ---------------------------------------------------------------------------


def eval_expression(expr: Expression, env: Mapping[str, float]) -> float:
    """Evaluate with child values bound by id."""
    if isinstance(expr, Literal):
        return expr.value
    if isinstance(expr, Ref):
        try:
            return float(env[expr.name])
        except KeyError:
            raise ExpressionEvalError(f"unresolved reference {expr.name!r}") from None
    if isinstance(expr, Unary):
        return -eval_expression(expr.operand, env)
    if isinstance(expr, Binary):
        left = eval_expression(expr.left, env)
        right = eval_expression(expr.right, env)
        if expr.op == "+":
            return left + right
        if expr.op == "-":
            return left - right
        if expr.op == "*":
            return left * right
        if right == 0.0:
            raise ExpressionEvalError("division by zero")
        return left / right
    if isinstance(expr, Call):
        args = [eval_expression(a, env) for a in expr.args]
        if expr.func == "min":
            return min(args)
        if expr.func == "max":
            return max(args)
        return math.fsum(args) / len(args)
    raise ExpressionEvalError(f"unsupported node {expr!r}")


def referenced_ids(expr: Expression) -> set[str]:
    if isinstance(expr, Ref):
        return {expr.name}
    if isinstance(expr, Unary):
        return referenced_ids(expr.operand)
    if isinstance(expr, Binary):
        return referenced_ids(expr.left) | referenced_ids(expr.right)
    if isinstance(expr, Call):
        out: set[str] = set()
        for a in expr.args:
            out |= referenced_ids(a)
        return out
    return set()


_PRECEDENCE = {"+": 1, "-": 1, "*": 2, "/": 2}


def _prec(expr: Expression) -> int:
    if isinstance(expr, Binary):
        return _PRECEDENCE[expr.op]
    if isinstance(expr, Unary):
        return 3
    return 4


def _number_text(x: float) -> str:
    s = repr(float(x))
    return s


def format_expression(expr: Expression) -> str:
    """Render an AST back to source; parsing the result reproduces the AST."""
    if isinstance(expr, Literal):
        return _number_text(expr.value)
    if isinstance(expr, Ref):
        return expr.name
    if isinstance(expr, Unary):
        inner = format_expression(expr.operand)
        if isinstance(expr.operand, Binary):
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(expr, Binary):
        prec = _PRECEDENCE[expr.op]
        left = format_expression(expr.left)
        if _prec(expr.left) < prec:
            left = f"({left})"
        right = format_expression(expr.right)
        if _prec(expr.right) <= prec:
            right = f"({right})"
        return f"{left} {expr.op} {right}"
    if isinstance(expr, Call):
        args = ", ".join(format_expression(a) for a in expr.args)
        return f"{expr.func}({args})"
    raise ExpressionError(f"unsupported node {expr!r}")
