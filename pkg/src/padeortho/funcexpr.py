"""A small expression language for supplying analytic functions.

Grammar (precedence low to high): additive, multiplicative, unary minus,
integer power, atom. Atoms are decimal literals, the variable ``z`` (alias
``x``), the constants ``pi`` and ``i``, parenthesized expressions, and the
calls ``exp``, ``log``, ``sqrt`` (principal branches, cut on the negative
real axis).
"""
from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

FUNCTIONS = ("exp", "log", "sqrt")
CONSTANTS = ("pi", "i")
VAR_NAMES = ("z", "x")


class ParseError(ValueError):
    def __init__(self, position: int, message: str):
        super().__init__(f"parse error at offset {position}: {message}")
        self.position = position
        self.message = message


class EvalError(ArithmeticError):
    def __init__(self, position: int, message: str):
        super().__init__(f"evaluation error at offset {position}: {message}")
        self.position = position
        self.message = message


@dataclass(frozen=True)
class Num:
    value: float
    pos: int = 0


@dataclass(frozen=True)
class Const:
    name: str
    pos: int = 0


@dataclass(frozen=True)
class Var:
    pos: int = 0


@dataclass(frozen=True)
class Neg:
    child: object
    pos: int = 0


@dataclass(frozen=True)
class Bin:
    op: str
    left: object
    right: object
    pos: int = 0


@dataclass(frozen=True)
class Pow:
    base: object
    exponent: int
    pos: int = 0


@dataclass(frozen=True)
class Call:
    func: str
    arg: object
    pos: int = 0


FuncExpr = object  # any of the node types above

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+\.\d*(?:[eE][-+]?\d+)?|\.\d+(?:[eE][-+]?\d+)?|\d+(?:[eE][-+]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))")


def _tokenize(src: str):
    tokens = []
    pos = 0
    while pos < len(src):
        if not src[pos:].strip():
            break
        m = _TOKEN_RE.match(src, pos)
        if m is None or m.end() == pos:
            strip = len(src[pos:]) - len(src[pos:].lstrip())
            raise ParseError(pos + strip, f"unexpected character {src[pos + strip]!r}")
        kind = m.lastgroup
        text = m.group(kind)
        tokens.append((kind, text, m.start(kind)))
        pos = m.end()
    tokens.append(("eof", "", len(src)))
    return tokens


class _Parser:
    def __init__(self, src: str):
        self.src = src
        self.tokens = _tokenize(src)
        self.k = 0

    def peek(self):
        return self.tokens[self.k]

    def advance(self):
        tok = self.tokens[self.k]
        self.k += 1
        return tok

    def expect_op(self, op):
        kind, text, pos = self.peek()
        if kind != "op" or text != op:
            raise ParseError(pos, f"expected {op!r}")
        return self.advance()

    def parse(self):
        node = self.additive()
        kind, text, pos = self.peek()
        if kind != "eof":
            raise ParseError(pos, f"unexpected trailing input {text!r}")
        return node

    def additive(self):
        node = self.multiplicative()
        while True:
            kind, text, pos = self.peek()
            if kind == "op" and text in "+-":
                self.advance()
                rhs = self.multiplicative()
                node = Bin(text, node, rhs, pos)
            else:
                return node

    def multiplicative(self):
        node = self.unary()
        while True:
            kind, text, pos = self.peek()
            if kind == "op" and text in "*/":
                self.advance()
                rhs = self.unary()
                node = Bin(text, node, rhs, pos)
            else:
                return node

    def unary(self):
        kind, text, pos = self.peek()
        if kind == "op" and text == "-":
            self.advance()
            return Neg(self.unary(), pos)
        return self.power()

    def power(self):
        node = self.atom()
        kind, text, pos = self.peek()
        if kind == "op" and text == "^":
            self.advance()
            node = Pow(node, self._integer_exponent(), pos)
        return node

    def _integer_exponent(self) -> int:
        sign = 1
        kind, text, pos = self.peek()
        if kind == "op" and text == "-":
            self.advance()
            sign = -1
            kind, text, pos = self.peek()
        if kind != "num":
            raise ParseError(pos, "exponent must be an integer literal")
        if any(c in text for c in ".eE"):
            raise ParseError(pos, f"non-integer exponent {text!r}")
        self.advance()
        return sign * int(text)

    def atom(self):
        kind, text, pos = self.advance()
        if kind == "num":
            return Num(float(text), pos)
        if kind == "ident":
            if text in VAR_NAMES:
                return Var(pos)
            if text in CONSTANTS:
                return Const(text, pos)
            if text in FUNCTIONS:
                self.expect_op("(")
                arg = self.additive()
                self.expect_op(")")
                return Call(text, arg, pos)
            raise ParseError(pos, f"unknown identifier {text!r}")
        if kind == "op" and text == "(":
            node = self.additive()
            self.expect_op(")")
            return node
        raise ParseError(pos, f"unexpected token {text!r}" if text else "unexpected end of input")


def parse(src: str) -> FuncExpr:
    """Parse an expression; raises ParseError with the source offset."""
    if not src or not src.strip():
        raise ParseError(0, "empty expression")
    return _Parser(src).parse()


def to_source(expr: FuncExpr) -> str:
    """Canonical printed form; re-parsing it reproduces the tree."""
    if isinstance(expr, Num):
        return repr(expr.value)
    if isinstance(expr, Const):
        return expr.name
    if isinstance(expr, Var):
        return "z"
    if isinstance(expr, Neg):
        return f"(-{to_source(expr.child)})"
    if isinstance(expr, Bin):
        return f"({to_source(expr.left)}{expr.op}{to_source(expr.right)})"
    if isinstance(expr, Pow):
        return f"({to_source(expr.base)})^{expr.exponent}"
    if isinstance(expr, Call):
        return f"{expr.func}({to_source(expr.arg)})"
    raise TypeError(f"not an expression node: {expr!r}")


def _ev(node, z):
    if isinstance(node, Num):
        return np.asarray(complex(node.value))
    if isinstance(node, Const):
        return np.asarray(np.pi + 0j) if node.name == "pi" else np.asarray(1j)
    if isinstance(node, Var):
        return z
    if isinstance(node, Neg):
        return -_ev(node.child, z)
    if isinstance(node, Bin):
        a = _ev(node.left, z)
        b = _ev(node.right, z)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if np.any(b == 0):
            raise EvalError(node.pos, "division by zero")
        return a / b
    if isinstance(node, Pow):
        base = _ev(node.base, z)
        if node.exponent < 0 and np.any(base == 0):
            raise EvalError(node.pos, "zero base with negative exponent")
        return base ** node.exponent
    if isinstance(node, Call):
        arg = _ev(node.arg, z)
        if node.func == "exp":
            return np.exp(arg)
        if node.func == "sqrt":
            return np.sqrt(arg)
        if np.any(arg == 0):
            raise EvalError(node.pos, "log of zero")
        return np.log(arg)
    raise TypeError(f"not an expression node: {node!r}")


def evaluate(expr: FuncExpr, z):
    """Evaluate at a complex scalar or ndarray of points."""
    scalar = np.isscalar(z) or isinstance(z, complex)
    zz = np.asarray(z, dtype=complex)
    out = _ev(expr, zz)
    if scalar:
        return complex(out)
    return np.broadcast_to(out, zz.shape).astype(complex)


def evaluator(expr: FuncExpr):
    """The expression as a plain callable."""
    return lambda z: evaluate(expr, z)
