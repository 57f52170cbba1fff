"""Recursive-descent parser for rational expressions.

Grammar (whitespace insignificant)::

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := '-' factor | base ('^' exponent)?
    base   := rational | var | '(' expr ')'
    exponent := int | '-' int | '(' '-'? int ')' | exponent '^' exponent

``^`` binds tighter than unary minus and is right-associative.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Sequence, Union

from .polynomial import Polynomial
from .ratfunc import RationalFunction


class ExpressionError(ValueError):
    """Base class for parse and compile errors."""


class ExpressionSyntaxError(ExpressionError):
    def __init__(self, message: str, position: int, text: str = ""):
        self.position = position
        self.text = text
        super().__init__(f"{message} at position {position}")


class UnknownVariableError(ExpressionError):
    def __init__(self, name: str, position: int):
        self.name = name
        self.position = position
        super().__init__(f"unknown variable {name!r} at position {position}")


class NonIntegerExponentError(ExpressionError):
    def __init__(self, position: int):
        self.position = position
        super().__init__(f"exponent must be an integer literal at position {position}")


class ZeroDenominatorError(ExpressionError, ZeroDivisionError):
    pass


@dataclass(frozen=True)
class Num:
    value: Fraction


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Pow:
    base: "Node"
    exponent: int


Node = Union[Num, Var, Neg, BinOp, Pow]

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\S))")


class _Lexer:
    def __init__(self, text: str):
        self.text = text
        self.tokens: List[tuple] = []
        pos = 0
        while True:
            m = _TOKEN.match(text, pos)
            if m is None or m.end() == pos:
                break
            if m.group(1) is not None:
                self.tokens.append(("int", m.group(1), m.start(1)))
            elif m.group(2) is not None:
                self.tokens.append(("name", m.group(2), m.start(2)))
            else:
                ch = m.group(3)
                if ch not in "+-*/^()":
                    raise ExpressionSyntaxError(f"unexpected character {ch!r}", m.start(3), text)
                self.tokens.append(("op", ch, m.start(3)))
            pos = m.end()
        self.tokens.append(("end", "", len(text)))
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def accept(self, value: str) -> bool:
        kind, val, _ = self.peek()
        if kind == "op" and val == value:
            self.i += 1
            return True
        return False

    def expect(self, value: str):
        kind, val, pos = self.peek()
        if not (kind == "op" and val == value):
            raise ExpressionSyntaxError(f"expected {value!r}, found {val or 'end of input'!r}", pos, self.text)
        self.i += 1


class _Parser:
    def __init__(self, text: str, variables: Iterable[str]):
        self.lex = _Lexer(text)
        self.variables = set(variables)

    def parse(self) -> Node:
        node = self.expr()
        kind, val, pos = self.lex.peek()
        if kind != "end":
            raise ExpressionSyntaxError(f"unexpected {val!r}", pos, self.lex.text)
        return node

    def expr(self) -> Node:
        node = self.term()
        while True:
            if self.lex.accept("+"):
                node = BinOp("+", node, self.term())
            elif self.lex.accept("-"):
                node = BinOp("-", node, self.term())
            else:
                return node

    def term(self) -> Node:
        node = self.factor()
        while True:
            if self.lex.accept("*"):
                node = BinOp("*", node, self.factor())
            elif self.lex.accept("/"):
                node = BinOp("/", node, self.factor())
            else:
                return node

    def factor(self) -> Node:
        if self.lex.accept("-"):
            return Neg(self.factor())
        base = self.base()
        if self.lex.accept("^"):
            return Pow(base, self.exponent())
        return base

    def exponent(self) -> int:
        kind, val, pos = self.lex.peek()
        if self.lex.accept("("):
            sign = -1 if self.lex.accept("-") else 1
            kind, val, p2 = self.lex.next()
            if kind != "int" or not (self.lex.peek()[0] == "op" and self.lex.peek()[1] == ")"):
                raise NonIntegerExponentError(pos)
            self.lex.next()
            value = sign * int(val)
        else:
            sign = -1 if self.lex.accept("-") else 1
            kind, val, p2 = self.lex.next()
            if kind != "int":
                raise NonIntegerExponentError(pos)
            value = sign * int(val)
        if self.lex.accept("^"):
            inner = self.exponent()
            if inner < 0:
                raise NonIntegerExponentError(pos)
            value = value ** inner
        return value

    def base(self) -> Node:
        kind, val, pos = self.lex.next()
        if kind == "int":
            return Num(Fraction(int(val)))
        if kind == "name":
            if val not in self.variables:
                raise UnknownVariableError(val, pos)
            return Var(val)
        if kind == "op" and val == "(":
            node = self.expr()
            self.lex.expect(")")
            return node
        raise ExpressionSyntaxError(f"unexpected {val or 'end of input'!r}", pos, self.lex.text)


def parse_expression(text: str, variables: Sequence[str]) -> Node:
    """Parse ``text`` into an AST over the declared ``variables``."""
    if not text or not text.strip():
        raise ExpressionSyntaxError("empty expression", 0, text)
    return _Parser(text, variables).parse()


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def print_expression(node: Node) -> str:
    """Render an AST back to grammar text, parenthesizing only where needed."""
    return _print(node, 0)


def _print(node: Node, ctx: int) -> str:
    if isinstance(node, Num):
        v = node.value
        if v.denominator == 1 and v >= 0:
            return str(v.numerator)
        return f"({v.numerator}/{v.denominator})" if v.denominator != 1 else f"({v.numerator})"
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        text = "-" + _print(node.operand, 3)
        return f"({text})" if ctx > 3 else text
    if isinstance(node, Pow):
        exp = str(node.exponent) if node.exponent >= 0 else f"({node.exponent})"
        text = f"{_print(node.base, 4)}^{exp}"
        return f"({text})" if ctx >= 4 else text
    if isinstance(node, BinOp):
        p = _PREC[node.op]
        left = _print(node.left, p)
        # right operand of - and / needs a strictly higher binding
        right = _print(node.right, p + 1 if node.op in "-/" else p + 0.5)
        text = f"{left} {node.op} {right}" if p == 1 else f"{left}{node.op}{right}"
        return f"({text})" if ctx > p else text
    raise TypeError(f"not an expression node: {node!r}")


def evaluate_expression(node: Node, point) -> Fraction:
    """Evaluate an AST directly with exact rational arithmetic."""
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return Fraction(point[node.name])
    if isinstance(node, Neg):
        return -evaluate_expression(node.operand, point)
    if isinstance(node, Pow):
        return evaluate_expression(node.base, point) ** node.exponent
    a = evaluate_expression(node.left, point)
    b = evaluate_expression(node.right, point)
    if node.op == "+":
        return a + b
    if node.op == "-":
        return a - b
    if node.op == "*":
        return a * b
    return a / b


def to_rational_function(node: Node, variables: Sequence[str]) -> RationalFunction:
    """Compile an AST to a canonical :class:`RationalFunction`."""
    variables = tuple(variables)
    if isinstance(node, Num):
        return RationalFunction.constant(variables, node.value)
    if isinstance(node, Var):
        return RationalFunction(Polynomial.variable(variables, node.name), _canonical=True)
    if isinstance(node, Neg):
        return -to_rational_function(node.operand, variables)
    if isinstance(node, Pow):
        base = to_rational_function(node.base, variables)
        if node.exponent < 0 and base.is_zero():
            raise ZeroDenominatorError("negative power of an identically zero expression")
        return base ** node.exponent
    a = to_rational_function(node.left, variables)
    b = to_rational_function(node.right, variables)
    if node.op == "+":
        return a + b
    if node.op == "-":
        return a - b
    if node.op == "*":
        return a * b
    if b.is_zero():
        raise ZeroDenominatorError("division by an identically zero expression")
    return a / b


def parse_rational_function(text: str, variables: Sequence[str]) -> RationalFunction:
    return to_rational_function(parse_expression(text, variables), variables)
