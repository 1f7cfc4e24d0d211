"""Expression language for component formulas in the variable ``x``.

Grammar (left associative, ``^`` binds tighter than unary minus)::

    expr  := term (('+' | '-') term)*
    term  := unary (('*' | '/') unary)*
    unary := '-' unary | power
    power := atom ('^' integer)?
    atom  := number | 'x' | fn '(' expr ')' | '(' expr ')'
    fn    := sqrt | sin | cos | exp

Exponents are non-negative integer literals and implicit multiplication is
rejected.  ASTs are immutable; node positions are byte offsets into the
source and do not take part in equality.
"""

import math
import re
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import EvalDomainError, JetError, LexError, ParseError
from .jets import Jet, make_variable

FUNCTIONS = ("sqrt", "sin", "cos", "exp")

_NUMBER = re.compile(r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")
_SINGLE = {
    "+": "plus",
    "-": "minus",
    "*": "star",
    "/": "slash",
    "^": "caret",
    "(": "lparen",
    ")": "rparen",
    ",": "comma",
}


@dataclass(frozen=True)
class Token:
    kind: str
    lexeme: str
    position: int


def tokenize(src):
    """Split ``src`` into tokens by maximal munch; whitespace is skipped."""
    tokens = []
    i = 0
    pos = 0  # byte offset of text[i]
    while i < len(src):
        ch = src[i]
        if ch.isspace():
            i += 1
            pos += len(ch.encode("utf-8"))
            continue
        m = _NUMBER.match(src, i) or _IDENT.match(src, i)
        if m:
            kind = "number" if m.re is _NUMBER else "ident"
            tokens.append(Token(kind, m.group(), pos))
            pos += len(m.group())
            i = m.end()
            continue
        if ch in _SINGLE:
            tokens.append(Token(_SINGLE[ch], ch, pos))
            i += 1
            pos += 1
            continue
        raise LexError(f"unrecognized character {ch!r} at byte {pos}", position=pos)
    return tokens


# --------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Const:
    value: float
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Var:
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Neg:
    operand: "Expr"
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * / ^
    left: "Expr"
    right: "Expr"
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Call:
    fn: str
    arg: "Expr"
    pos: int = field(default=0, compare=False)


Expr = Union[Const, Var, Neg, BinOp, Call]


class _Parser:
    def __init__(self, tokens, src_len):
        self.toks = tokens
        self.i = 0
        self.end = src_len

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def pos(self):
        t = self.peek()
        return t.position if t is not None else self.end

    def take(self, kind, expected):
        t = self.peek()
        if t is None or t.kind != kind:
            found = "end of input" if t is None else repr(t.lexeme)
            raise ParseError(
                f"expected {expected} at byte {self.pos()}, found {found}",
                position=self.pos(),
                expected=expected,
            )
        self.i += 1
        return t

    def expr(self):
        node = self.term()
        while (t := self.peek()) is not None and t.kind in ("plus", "minus"):
            self.i += 1
            node = BinOp(t.lexeme, node, self.term(), t.position)
        return node

    def term(self):
        node = self.unary()
        while (t := self.peek()) is not None and t.kind in ("star", "slash"):
            self.i += 1
            node = BinOp(t.lexeme, node, self.unary(), t.position)
        return node

    def unary(self):
        t = self.peek()
        if t is not None and t.kind == "minus":
            self.i += 1
            return Neg(self.unary(), t.position)
        return self.power()

    def power(self):
        base = self.atom()
        t = self.peek()
        if t is not None and t.kind == "caret":
            self.i += 1
            e = self.take("number", "non-negative integer exponent")
            if not e.lexeme.isdigit():
                raise ParseError(
                    f"exponent must be a non-negative integer literal, got {e.lexeme!r}",
                    position=e.position,
                    expected="non-negative integer exponent",
                )
            return BinOp("^", base, Const(float(int(e.lexeme)), e.position), t.position)
        return base

    def atom(self):
        t = self.peek()
        if t is None:
            raise ParseError(
                f"unexpected end of input at byte {self.end}",
                position=self.end,
                expected="number, 'x', function call or '('",
            )
        if t.kind == "number":
            self.i += 1
            return Const(float(t.lexeme), t.position)
        if t.kind == "ident":
            self.i += 1
            if t.lexeme == "x":
                return Var(t.position)
            if t.lexeme in FUNCTIONS:
                self.take("lparen", "'('")
                arg = self.expr()
                self.take("rparen", "')'")
                return Call(t.lexeme, arg, t.position)
            raise ParseError(
                f"unknown identifier {t.lexeme!r} at byte {t.position}",
                position=t.position,
                expected="'x' or one of " + ", ".join(FUNCTIONS),
            )
        if t.kind == "lparen":
            self.i += 1
            node = self.expr()
            self.take("rparen", "')'")
            return node
        raise ParseError(
            f"unexpected {t.lexeme!r} at byte {t.position}",
            position=t.position,
            expected="number, 'x', function call or '('",
        )


def parse(tokens, src_len=None):
    """Parse a token list into an AST.  Trailing tokens are an error."""
    if not tokens:
        raise ParseError("empty expression", position=0, expected="expression")
    if src_len is None:
        last = tokens[-1]
        src_len = last.position + len(last.lexeme.encode("utf-8"))
    p = _Parser(tokens, src_len)
    node = p.expr()
    if p.peek() is not None:
        t = p.peek()
        raise ParseError(
            f"trailing input {t.lexeme!r} at byte {t.position}",
            position=t.position,
            expected="end of input",
        )
    return node


def parse_expr(src):
    return parse(tokenize(src), len(src.encode("utf-8")))


# --------------------------------------------------------------------------
# printing

def to_source(node):
    """Render an AST as text that reparses to an equal AST."""
    if isinstance(node, Const):
        if node.value < 0 or not math.isfinite(node.value):
            raise ValueError(f"literal {node.value} cannot be printed")
        return repr(float(node.value))
    if isinstance(node, Var):
        return "x"
    if isinstance(node, Call):
        return f"{node.fn}({to_source(node.arg)})"
    if isinstance(node, Neg):
        return f"(-{to_source(node.operand)})"
    if node.op == "^":
        base = to_source(node.left)
        if isinstance(node.left, BinOp) and node.left.op == "^":
            base = f"({base})"
        return f"{base}^{int(node.right.value)}"
    return f"({to_source(node.left)} {node.op} {to_source(node.right)})"


# --------------------------------------------------------------------------
# evaluation


def eval_jet(ast, x0, N):
    """Fold the AST over jet arithmetic seeded with the identity jet at ``x0``."""
    return _ev_jet(ast, make_variable(x0, N), x0, N)


def _ev_jet(node, var, x0, N):
    try:
        if isinstance(node, Const):
            return Jet.constant(node.value, x0, N)
        if isinstance(node, Var):
            return var
        if isinstance(node, Neg):
            return -_ev_jet(node.operand, var, x0, N)
        if isinstance(node, Call):
            return getattr(_ev_jet(node.arg, var, x0, N), node.fn)()
        if node.op == "^":
            return _ev_jet(node.left, var, x0, N) ** int(node.right.value)
        a = _ev_jet(node.left, var, x0, N)
        b = _ev_jet(node.right, var, x0, N)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        return a / b
    except JetError as exc:
        if exc.position is None:
            exc.position = node.pos
        raise


def eval_real(ast, x):
    """Plain floating-point evaluation; ``x`` may also be a numpy array."""
    with np.errstate(all="ignore"):
        return _ev_real(ast, x)


def _ev_real(node, x):
    if isinstance(node, Const):
        return node.value if np.isscalar(x) else np.full(np.shape(x), node.value)
    if isinstance(node, Var):
        return x
    if isinstance(node, Neg):
        return -_ev_real(node.operand, x)
    if isinstance(node, Call):
        a = _ev_real(node.arg, x)
        if node.fn == "sqrt":
            if np.any(np.asarray(a) < 0):
                raise EvalDomainError("sqrt of negative value", position=node.pos)
            return np.sqrt(a) if not np.isscalar(a) else math.sqrt(a)
        f = {"sin": np.sin, "cos": np.cos, "exp": np.exp}[node.fn]
        out = f(a)
        return float(out) if np.isscalar(a) else out
    if node.op == "^":
        return _ev_real(node.left, x) ** int(node.right.value)
    a = _ev_real(node.left, x)
    b = _ev_real(node.right, x)
    if node.op == "+":
        return a + b
    if node.op == "-":
        return a - b
    if node.op == "*":
        return a * b
    if np.any(np.abs(np.asarray(b)) < 1e-300):
        raise EvalDomainError("division by zero", position=node.pos)
    return a / b
