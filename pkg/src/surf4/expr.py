"""Expression parsing and order-2 jet evaluation in the two chart variables u, v.

An expression is an immutable tree built from numbers, the variables u and v,
named constants, the arithmetic operators + - * / ^ (with unary minus), and a
fixed set of analytic functions. Evaluation produces a Jet2: the value together
with all partial derivatives up to second order, propagated exactly by the
chain rule. This is the only differentiation mechanism in the package; nothing
downstream differentiates expressions symbolically or numerically.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Optional, Union


class ExpressionError(Exception):
    """Base class for expression failures."""


class ParseError(ExpressionError):
    """Raised on malformed input, with the byte offset of the failure."""

    def __init__(self, message: str, text: str, pos: int):
        self.offset = len(text[:pos].encode("utf-8"))
        super().__init__(f"{message} (byte {self.offset})")


class DomainError(ExpressionError):
    """Raised when evaluation leaves a function's real domain."""


class UnboundConstantError(ExpressionError):
    """Raised when evaluation meets a constant with no binding."""


# ---------------------------------------------------------------------------
# AST

@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str  # "u" or "v"


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Expression"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * / ^
    left: "Expression"
    right: "Expression"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expression"


Expression = Union[Num, Var, Const, Neg, BinOp, Call]

# Bindings for named constants. Lookups of unbound names raise
# UnboundConstantError at evaluation time.
ConstantBindings = dict

FUNCTIONS = ("sin", "cos", "tan", "exp", "ln", "sqrt", "sinh", "cosh", "abs")


# ---------------------------------------------------------------------------
# Order-2 jets

@dataclass(frozen=True)
class Jet2:
    """Truncated second-order Taylor data of a scalar field at a point.

    Components: value, the two first partials, and the three second partials
    (duv is the mixed one). Arithmetic implements the product, quotient and
    chain rules on these six slots; third-order information is discarded.
    """

    val: float
    du: float = 0.0
    dv: float = 0.0
    duu: float = 0.0
    duv: float = 0.0
    dvv: float = 0.0

    @staticmethod
    def constant(x: float) -> "Jet2":
        return Jet2(float(x))

    @staticmethod
    def variable(name: str, u: float, v: float) -> "Jet2":
        if name == "u":
            return Jet2(float(u), du=1.0)
        return Jet2(float(v), dv=1.0)

    def is_constant(self) -> bool:
        return self.du == 0.0 and self.dv == 0.0 and \
            self.duu == 0.0 and self.duv == 0.0 and self.dvv == 0.0

    def __add__(self, other: "Jet2") -> "Jet2":
        return Jet2(self.val + other.val, self.du + other.du,
                    self.dv + other.dv, self.duu + other.duu,
                    self.duv + other.duv, self.dvv + other.dvv)

    def __sub__(self, other: "Jet2") -> "Jet2":
        return Jet2(self.val - other.val, self.du - other.du,
                    self.dv - other.dv, self.duu - other.duu,
                    self.duv - other.duv, self.dvv - other.dvv)

    def __neg__(self) -> "Jet2":
        return Jet2(-self.val, -self.du, -self.dv,
                    -self.duu, -self.duv, -self.dvv)

    def __mul__(self, other: "Jet2") -> "Jet2":
        f, g = self, other
        return Jet2(
            f.val * g.val,
            f.du * g.val + f.val * g.du,
            f.dv * g.val + f.val * g.dv,
            f.duu * g.val + 2.0 * f.du * g.du + f.val * g.duu,
            f.duv * g.val + f.du * g.dv + f.dv * g.du + f.val * g.duv,
            f.dvv * g.val + 2.0 * f.dv * g.dv + f.val * g.dvv,
        )

    def __truediv__(self, other: "Jet2") -> "Jet2":
        f, g = self, other
        if g.val == 0.0:
            raise DomainError("division by zero")
        q = f.val / g.val
        qu = (f.du - q * g.du) / g.val
        qv = (f.dv - q * g.dv) / g.val
        quu = (f.duu - 2.0 * qu * g.du - q * g.duu) / g.val
        quv = (f.duv - qu * g.dv - qv * g.du - q * g.duv) / g.val
        qvv = (f.dvv - 2.0 * qv * g.dv - q * g.dvv) / g.val
        return Jet2(q, qu, qv, quu, quv, qvv)


def _chain(j: Jet2, val: float, d1: float, d2: float) -> Jet2:
    # phi(f): first order phi' f_x, second order phi'' f_x f_y + phi' f_xy.
    return Jet2(
        val,
        d1 * j.du,
        d1 * j.dv,
        d2 * j.du * j.du + d1 * j.duu,
        d2 * j.du * j.dv + d1 * j.duv,
        d2 * j.dv * j.dv + d1 * j.dvv,
    )


def _apply_function(name: str, j: Jet2) -> Jet2:
    x = j.val
    if name == "sin":
        return _chain(j, math.sin(x), math.cos(x), -math.sin(x))
    if name == "cos":
        return _chain(j, math.cos(x), -math.sin(x), -math.cos(x))
    if name == "tan":
        c = math.cos(x)
        if c == 0.0:
            raise DomainError("tan at an odd multiple of pi/2")
        s2 = 1.0 / (c * c)
        return _chain(j, math.tan(x), s2, 2.0 * s2 * math.tan(x))
    if name == "exp":
        e = math.exp(x)
        return _chain(j, e, e, e)
    if name == "ln":
        if x <= 0.0:
            raise DomainError(f"ln of non-positive value {x!r}")
        return _chain(j, math.log(x), 1.0 / x, -1.0 / (x * x))
    if name == "sqrt":
        if x <= 0.0:
            raise DomainError(f"sqrt of non-positive value {x!r}")
        r = math.sqrt(x)
        return _chain(j, r, 0.5 / r, -0.25 / (x * r))
    if name == "sinh":
        return _chain(j, math.sinh(x), math.cosh(x), math.sinh(x))
    if name == "cosh":
        return _chain(j, math.cosh(x), math.sinh(x), math.cosh(x))
    if name == "abs":
        if x == 0.0:
            raise DomainError("abs is not differentiable at 0")
        s = 1.0 if x > 0.0 else -1.0
        return _chain(j, abs(x), s, 0.0)
    raise ExpressionError(f"no such function {name!r}")


INT_EXPONENT_TOL = 1e-12


def _pow_int(base: Jet2, n: int) -> Jet2:
    if n == 0:
        return Jet2.constant(1.0)
    if n < 0:
        return Jet2.constant(1.0) / _pow_int(base, -n)
    result = Jet2.constant(1.0)
    square = base
    while n:
        if n & 1:
            result = result * square
        square = square * square
        n >>= 1
    return result


def _jet_pow(base: Jet2, expo: Jet2) -> Jet2:
    if expo.is_constant():
        e = expo.val
        n = round(e)
        if abs(e - n) < INT_EXPONENT_TOL:
            if base.val == 0.0 and n < 0:
                raise DomainError("zero raised to a negative power")
            return _pow_int(base, int(n))
    if base.val <= 0.0:
        raise DomainError(
            f"non-integer power of non-positive base {base.val!r}")
    return _apply_function("exp", expo * _apply_function("ln", base))


# ---------------------------------------------------------------------------
# Tokenizer and parser

_TOKEN_RE = re.compile(r"""
    (?P<num>(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^(),])
  | (?P<ws>\s+)
""", re.VERBOSE)


class _Parser:
    def __init__(self, text: str, constants: Optional[set]):
        self.text = text
        self.constants = constants
        self.tokens = self._scan(text)
        self.i = 0

    def _scan(self, text):
        tokens, pos = [], 0
        while pos < len(text):
            m = _TOKEN_RE.match(text, pos)
            if m is None:
                raise ParseError(
                    f"unexpected character {text[pos]!r}", text, pos)
            if m.lastgroup != "ws":
                tokens.append((m.lastgroup, m.group(), pos))
            pos = m.end()
        tokens.append(("end", "", len(text)))
        return tokens

    def _peek(self):
        return self.tokens[self.i]

    def _advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def _expect_op(self, symbol):
        kind, text, pos = self._peek()
        if kind == "op" and text == symbol:
            return self._advance()
        shown = text if text else "end of input"
        raise ParseError(
            f"expected {symbol!r} but found {shown!r}", self.text, pos)

    def parse(self) -> Expression:
        node = self._sum()
        kind, text, pos = self._peek()
        if kind != "end":
            raise ParseError(
                f"expected operator or end of input but found {text!r}",
                self.text, pos)
        return node

    def _sum(self):
        node = self._product()
        while True:
            kind, text, _ = self._peek()
            if kind == "op" and text in "+-":
                self._advance()
                node = BinOp(text, node, self._product())
            else:
                return node

    def _product(self):
        node = self._unary()
        while True:
            kind, text, _ = self._peek()
            if kind == "op" and text in "*/":
                self._advance()
                node = BinOp(text, node, self._unary())
            else:
                return node

    def _unary(self):
        kind, text, _ = self._peek()
        if kind == "op" and text == "-":
            self._advance()
            return Neg(self._unary())
        return self._power()

    def _power(self):
        base = self._atom()
        kind, text, _ = self._peek()
        if kind == "op" and text == "^":
            self._advance()
            # exponent may carry its own unary minus: u^-2
            return BinOp("^", base, self._unary())
        return base

    def _atom(self):
        kind, text, pos = self._advance()
        if kind == "num":
            return Num(float(text))
        if kind == "op" and text == "(":
            node = self._sum()
            self._expect_op(")")
            return node
        if kind == "ident":
            nk, nt, _ = self._peek()
            if nk == "op" and nt == "(":
                return self._call(text, pos)
            if text in ("u", "v"):
                return Var(text)
            if text in FUNCTIONS or text == "pow":
                raise ParseError(
                    f"expected '(' after function {text!r}", self.text, pos)
            if self.constants is not None and text not in self.constants:
                raise ParseError(
                    f"unknown identifier {text!r}", self.text, pos)
            return Const(text)
        shown = text if text else "end of input"
        raise ParseError(
            f"expected a number, name, '-' or '(' but found {shown!r}",
            self.text, pos)

    def _call(self, name, pos):
        self._expect_op("(")
        first = self._sum()
        if name == "pow":
            self._expect_op(",")
            second = self._sum()
            self._expect_op(")")
            return BinOp("^", first, second)
        self._expect_op(")")
        if name not in FUNCTIONS:
            raise ParseError(f"unknown function {name!r}", self.text, pos)
        return Call(name, first)


def parse_expression(text: str,
                     constants: Optional[set] = None) -> Expression:
    """Parse text into an expression tree.

    When a set of constant names is supplied, any identifier that is not u, v,
    a function name, or one of those constants is rejected here rather than at
    evaluation time. pow(x, y) is folded into the ^ operator during parsing.
    """
    return _Parser(text, set(constants) if constants is not None else None).parse()


# ---------------------------------------------------------------------------
# Evaluation

def evaluate_jet(expr: Expression, u: float, v: float,
                 constants: Optional[ConstantBindings] = None) -> Jet2:
    """Evaluate the expression at (u, v) with all partials through order 2."""
    consts = constants or {}

    def ev(node):
        if isinstance(node, Num):
            return Jet2.constant(node.value)
        if isinstance(node, Var):
            return Jet2.variable(node.name, u, v)
        if isinstance(node, Const):
            if node.name not in consts:
                raise UnboundConstantError(
                    f"constant {node.name!r} has no binding")
            return Jet2.constant(consts[node.name])
        if isinstance(node, Neg):
            return -ev(node.operand)
        if isinstance(node, Call):
            return _apply_function(node.func, ev(node.arg))
        if isinstance(node, BinOp):
            a = ev(node.left)
            b = ev(node.right)
            if node.op == "+":
                return a + b
            if node.op == "-":
                return a - b
            if node.op == "*":
                return a * b
            if node.op == "/":
                return a / b
            return _jet_pow(a, b)
        raise ExpressionError(f"unknown node {node!r}")

    return ev(expr)


def evaluate_scalar(expr: Expression, u: float, v: float,
                    constants: Optional[ConstantBindings] = None) -> float:
    """Value only; identical to evaluate_jet(...).val."""
    return evaluate_jet(expr, u, v, constants).val


# ---------------------------------------------------------------------------
# Printing

_PREC_ADD, _PREC_MUL, _PREC_NEG, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4, 5


def _prec(node) -> int:
    if isinstance(node, BinOp):
        if node.op in "+-":
            return _PREC_ADD
        if node.op in "*/":
            return _PREC_MUL
        return _PREC_POW
    if isinstance(node, Neg):
        return _PREC_NEG
    if isinstance(node, Num) and (node.value < 0.0 or
                                  math.copysign(1.0, node.value) < 0.0):
        return _PREC_NEG
    return _PREC_ATOM


def to_text(node: Expression) -> str:
    """Render a tree to text that parses back with the same evaluation."""
    if isinstance(node, Num):
        return repr(float(node.value))
    if isinstance(node, Var) or isinstance(node, Const):
        return node.name
    if isinstance(node, Call):
        return f"{node.func}({to_text(node.arg)})"
    if isinstance(node, Neg):
        inner = to_text(node.operand)
        if _prec(node.operand) <= _PREC_NEG:
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(node, BinOp):
        lp, rp = _prec(node.left), _prec(node.right)
        left, right = to_text(node.left), to_text(node.right)
        p = _prec(node)
        if node.op == "^":
            # right-associative: parenthesize the left side at equal level
            if lp <= p:
                left = f"({left})"
            if rp < p:
                right = f"({right})"
        else:
            if lp < p:
                left = f"({left})"
            if rp <= p:
                right = f"({right})"
        return f"{left}{node.op}{right}"
    raise ExpressionError(f"unknown node {node!r}")
