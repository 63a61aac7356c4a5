"""Recursive-descent parser and evaluators for ingredient expressions in (t, x, v).

Grammar, loosest binding first::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?
    atom   := number | ident | ident '(' expr ')' | '(' expr ')'

so ``-x^2`` is ``-(x^2)`` and ``2^3^2`` is ``2^(3^2)``. Only smooth primitives
are available; ``abs``, ``min``, ``max`` and ``sign`` are unknown identifiers.
"""

from __future__ import annotations

import math
import operator
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Union

from timescale_lagrangian.errors import (
    ArityError,
    ExpressionEvaluationError,
    ExpressionSyntaxError,
    UnknownIdentifierError,
)

from .hyperdual import HyperDual


VARIABLES = ("t", "x", "v")
FUNCTIONS = ("sin", "cos", "exp", "ln", "sqrt")


@dataclass(frozen=True)
class Number:
    value: float


@dataclass(frozen=True)
class Variable:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: Expr


@dataclass(frozen=True)
class Binary:
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Call:
    func: str
    arg: Expr


Expr = Union[Number, Variable, Neg, Binary, Call]


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    position: int


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^(),])
    """,
    re.VERBOSE,
)


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    position = 0
    while position < len(source):
        match = _TOKEN_RE.match(source, position)
        if match is None:
            raise ExpressionSyntaxError(f"unexpected character {source[position]!r}", position)
        kind = match.lastgroup or ""
        if kind != "ws":
            tokens.append(Token(kind, match.group(), position))
        position = match.end()
    tokens.append(Token("end", "", len(source)))
    return tokens


class _Parser:
    def __init__(self, source: str) -> None:
        self.tokens = tokenize(source)
        self.index = 0

    def peek(self) -> Token:
        return self.tokens[self.index]

    def advance(self) -> Token:
        token = self.tokens[self.index]
        if token.kind != "end":
            self.index += 1
        return token

    def accept(self, *texts: str) -> Token | None:
        token = self.peek()
        if token.kind == "op" and token.text in texts:
            return self.advance()
        return None

    def expect(self, text: str) -> Token:
        token = self.accept(text)
        if token is None:
            found = self.peek()
            what = "end of input" if found.kind == "end" else repr(found.text)
            raise ExpressionSyntaxError(f"expected {text!r} but found {what}", found.position)
        return token

    def parse(self) -> Expr:
        tree = self.expr()
        trailing = self.peek()
        if trailing.kind != "end":
            raise ExpressionSyntaxError(f"unexpected {trailing.text!r}", trailing.position)
        return tree

    def expr(self) -> Expr:
        node = self.term()
        while (token := self.accept("+", "-")) is not None:
            node = Binary(token.text, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.unary()
        while (token := self.accept("*", "/")) is not None:
            node = Binary(token.text, node, self.unary())
        return node

    def unary(self) -> Expr:
        if self.accept("-") is not None:
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.accept("^") is not None:
            return Binary("^", base, self.unary())
        return base

    def atom(self) -> Expr:
        token = self.advance()
        if token.kind == "number":
            return Number(float(token.text))
        if token.kind == "ident":
            return self.identifier(token)
        if token.kind == "op" and token.text == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        what = "end of input" if token.kind == "end" else repr(token.text)
        raise ExpressionSyntaxError(f"expected a number, variable or '(' but found {what}", token.position)

    def identifier(self, token: Token) -> Expr:
        name = token.text
        if name in VARIABLES:
            if self.peek().text == "(":
                raise ExpressionSyntaxError(f"variable {name!r} cannot be called", self.peek().position)
            return Variable(name)
        if name not in FUNCTIONS:
            raise UnknownIdentifierError(name, token.position)
        if self.accept("(") is None:
            raise ExpressionSyntaxError(f"function {name!r} takes exactly 1 argument", token.position)
        arg = self.expr()
        if (comma := self.accept(",")) is not None:
            raise ExpressionSyntaxError(f"function {name!r} takes exactly 1 argument", comma.position)
        self.expect(")")
        return Call(name, arg)


def parse(source: str) -> Expr:
    """Parse ``source`` into an expression tree."""
    return _Parser(source).parse()


_PRECEDENCE = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 4}
_NEG_PRECEDENCE = 3
_ATOM_PRECEDENCE = 5


def _precedence(node: Expr) -> int:
    if isinstance(node, Binary):
        return _PRECEDENCE[node.op]
    if isinstance(node, Neg):
        return _NEG_PRECEDENCE
    if isinstance(node, Number) and node.value < 0:
        return _NEG_PRECEDENCE
    return _ATOM_PRECEDENCE


def to_source(node: Expr) -> str:
    """Print ``node`` with the minimal parentheses that reparse to the same tree."""

    def wrap(child: Expr, minimum: int) -> str:
        text = to_source(child)
        return f"({text})" if _precedence(child) < minimum else text

    if isinstance(node, Number):
        return repr(node.value)
    if isinstance(node, Variable):
        return node.name
    if isinstance(node, Neg):
        return "-" + wrap(node.operand, _NEG_PRECEDENCE)
    if isinstance(node, Call):
        return f"{node.func}({to_source(node.arg)})"
    if node.op == "^":
        return f"{wrap(node.left, _ATOM_PRECEDENCE)}^{wrap(node.right, _NEG_PRECEDENCE)}"
    level = _PRECEDENCE[node.op]
    return f"{wrap(node.left, level)} {node.op} {wrap(node.right, level + 1)}"


def free_variables(node: Expr) -> frozenset[str]:
    if isinstance(node, Variable):
        return frozenset({node.name})
    if isinstance(node, Number):
        return frozenset()
    if isinstance(node, Neg):
        return free_variables(node.operand)
    if isinstance(node, Call):
        return free_variables(node.arg)
    return free_variables(node.left) | free_variables(node.right)


def validate_arity(node: Expr, allowed: Iterable[str], *, label: str = "expression") -> None:
    """Raise ``ArityError`` listing every variable of ``node`` outside ``allowed``."""

    disallowed = free_variables(node) - frozenset(allowed)
    if disallowed:
        raise ArityError(disallowed, label=label)


def _ln(u: float) -> float:
    if u <= 0:
        raise ValueError("logarithm of a non-positive number")
    return math.log(u)


def _sqrt(u: float) -> float:
    if u <= 0:
        raise ValueError("square root needs a positive argument")
    return math.sqrt(u)


@lru_cache(maxsize=None)
def _exponent_varies(node: Expr) -> bool:
    return bool(free_variables(node) & {"x", "v"})


def _float_pow(base: float, exponent: float, varies: bool) -> float:
    # an exponent in x or v needs a positive base even where it is integer-valued
    if varies and base <= 0:
        raise ValueError("real powers need a positive base")
    if float(exponent).is_integer():
        if base == 0 and exponent < 0:
            raise ZeroDivisionError("zero raised to a negative power")
        return float(base ** int(exponent))
    if base <= 0:
        raise ValueError("real powers need a positive base")
    return float(base**exponent)


_FLOAT_FUNCTIONS: dict[str, Callable[[float], float]] = {
    "sin": math.sin,
    "cos": math.cos,
    "exp": math.exp,
    "ln": _ln,
    "sqrt": _sqrt,
}


def _lifted(method: Callable[[HyperDual], HyperDual]) -> Callable[[HyperDual | float], HyperDual]:
    def apply(u: HyperDual | float) -> HyperDual:
        return method(u if isinstance(u, HyperDual) else HyperDual.constant(u))

    return apply


_HYPER_FUNCTIONS: dict[str, Callable[[HyperDual | float], HyperDual]] = {
    "sin": _lifted(HyperDual.sin),
    "cos": _lifted(HyperDual.cos),
    "exp": _lifted(HyperDual.exp),
    "ln": _lifted(HyperDual.log),
    "sqrt": _lifted(HyperDual.sqrt),
}

_BINARY = {"+": operator.add, "-": operator.sub, "*": operator.mul, "/": operator.truediv}


def _walk(node: Expr, env: dict, functions: dict, power: Callable) -> object:
    try:
        if isinstance(node, Number):
            return node.value
        if isinstance(node, Variable):
            return env[node.name]
        if isinstance(node, Neg):
            return -_walk(node.operand, env, functions, power)
        if isinstance(node, Call):
            return functions[node.func](_walk(node.arg, env, functions, power))
        left = _walk(node.left, env, functions, power)
        right = _walk(node.right, env, functions, power)
        if node.op == "^":
            return power(left, right, _exponent_varies(node.right))
        return _BINARY[node.op](left, right)
    except ExpressionEvaluationError:
        raise
    except ZeroDivisionError as exc:
        raise ExpressionEvaluationError(str(exc) or "division by zero", to_source(node)) from exc
    except (ValueError, OverflowError) as exc:
        raise ExpressionEvaluationError(str(exc), to_source(node)) from exc


def _hyper_pow(base: HyperDual | float, exponent: HyperDual | float, varies: bool) -> HyperDual:
    if not isinstance(base, HyperDual):
        base = HyperDual.constant(base)
    if varies and base.value <= 0:
        raise ValueError("real powers need a positive base")
    return base**exponent


def evaluate(node: Expr, t: float, x: float = 0.0, v: float = 0.0) -> float:
    """Plain float value of ``node`` at (t, x, v)."""

    env = {"t": float(t), "x": float(x), "v": float(v)}
    return float(_walk(node, env, _FLOAT_FUNCTIONS, _float_pow))  # type: ignore[arg-type]


def eval2(node: Expr, t: float, x: float, v: float) -> HyperDual:
    """Value and all partials in (x, v) through order two, exact to rounding."""

    env = {"t": float(t), "x": HyperDual.seed_x(x), "v": HyperDual.seed_v(v)}
    result = _walk(node, env, _HYPER_FUNCTIONS, _hyper_pow)
    if isinstance(result, HyperDual):
        return result
    return HyperDual.constant(result)  # type: ignore[arg-type]


def eval2_at(node: Expr, t: float, x: HyperDual, v: HyperDual) -> HyperDual:
    """Evaluate with caller-supplied differentiation numbers for x and v."""

    env = {"t": float(t), "x": x, "v": v}
    result = _walk(node, env, _HYPER_FUNCTIONS, _hyper_pow)
    if isinstance(result, HyperDual):
        return result
    return HyperDual.constant(result)  # type: ignore[arg-type]


__all__ = [
    "Binary",
    "Call",
    "Expr",
    "FUNCTIONS",
    "Neg",
    "Number",
    "Token",
    "VARIABLES",
    "Variable",
    "eval2",
    "eval2_at",
    "evaluate",
    "free_variables",
    "parse",
    "to_source",
    "tokenize",
    "validate_arity",
]
