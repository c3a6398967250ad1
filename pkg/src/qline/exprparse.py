"""Recursive-descent parser for the operator expression language.

Grammar::

    expr   := term (('+'|'-') term)*
    term   := '-'? factor ('*' factor)*
    factor := atom ('^' sint)?
    atom   := 'x' | 'L' | 'd1' | 'db1' | 'i' | rational
            | fname '(' expr ')' | '(' expr ')'
    fname  := 'e1' | 'eb1' | 'eR1' | 'd' | 'db' | 'dR' | 'star'

There is no implicit multiplication and no division operator; ``p/q`` is a
rational literal.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple, Union

from .algebra import AlgebraElement, DoubledElement, derive_e1, derive_e1bar, derive_eR1, involute
from .calculus import FormElement, differential
from .exactnum import CplxRat
from .params import Params

ATOMS = ("x", "L", "d1", "db1", "i")
FUNCTIONS = ("e1", "eb1", "eR1", "d", "db", "dR", "star")


class ParseError(ValueError):
    def __init__(self, msg: str, text: str, pos: int):
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        self.line, self.col, self.msg = line, col, msg
        super().__init__(f"{line}:{col}: {msg}")


class EvalError(ValueError):
    """Type errors during evaluation."""


# -----------------------------------------------------------------------------
# AST
# -----------------------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: Fraction


@dataclass(frozen=True)
class Atom:
    name: str


@dataclass(frozen=True)
class Power:
    base: "Node"
    exp: int


@dataclass(frozen=True)
class Product:
    factors: Tuple["Node", ...]


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class Sum:
    terms: Tuple[Tuple[str, "Node"], ...]


@dataclass(frozen=True)
class Apply:
    fname: str
    arg: "Node"


Node = Union[Num, Atom, Power, Product, Neg, Sum, Apply]


# -----------------------------------------------------------------------------
# lexer and parser
# -----------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z][A-Za-z0-9]*)|(?P<op>[-+*^/()]))")


def _tokenize(text: str) -> List[Tuple[str, str, int]]:
    toks = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            start = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ParseError(f"unexpected character {text[start]!r}", text, start)
        kind = m.lastgroup
        toks.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    toks.append(("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def next(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, self.text, tok[2])

    def expect(self, value):
        t = self.peek()
        if t[1] != value or t[0] == "end":
            self.error(f"expected {value!r}, found {t[1] or 'end of input'!r}")
        return self.next()

    def parse(self) -> Node:
        node = self.expr()
        if self.peek()[0] != "end":
            self.error(f"unexpected {self.peek()[1]!r}")
        return node

    def expr(self) -> Node:
        terms = [("+", self.term())]
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            sign = self.next()[1]
            terms.append((sign, self.term()))
        return terms[0][1] if len(terms) == 1 else Sum(tuple(terms))

    def term(self) -> Node:
        neg = False
        if self.peek() [1] == "-" and self.peek()[0] == "op":
            self.next()
            neg = True
        factors = [self.factor()]
        while self.peek()[1] == "*":
            self.next()
            factors.append(self.factor())
        node = factors[0] if len(factors) == 1 else Product(tuple(factors))
        return Neg(node) if neg else node

    def factor(self) -> Node:
        base = self.atom()
        if self.peek()[1] == "^":
            self.next()
            sign = 1
            if self.peek()[1] == "-":
                self.next()
                sign = -1
            t = self.peek()
            if t[0] != "num":
                if t[1] == "(" or t[0] == "name":
                    self.error("exponent must be an integer literal")
                self.error(f"expected integer exponent, found {t[1] or 'end of input'!r}")
            self.next()
            if self.peek()[1] == "/":
                self.error("non-integer exponent")
            return Power(base, sign * int(t[1]))
        return base

    def atom(self) -> Node:
        t = self.peek()
        kind, val = t[0], t[1]
        if kind == "num":
            self.next()
            num = int(val)
            if self.peek()[1] == "/":
                self.next()
                d = self.peek()
                if d[0] != "num":
                    self.error("expected denominator")
                self.next()
                if int(d[1]) == 0:
                    self.error("zero denominator", d)
                return Num(Fraction(num, int(d[1])))
            return Num(Fraction(num))
        if kind == "name":
            if val in ATOMS:
                self.next()
                return Atom(val)
            if val in FUNCTIONS:
                self.next()
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Apply(val, arg)
            if self.toks[self.i + 1][1] == "(":
                self.error(f"unknown function {val!r}")
            self.error(f"unknown symbol {val!r}")
        if val == "(":
            self.next()
            node = self.expr()
            self.expect(")")
            return node
        self.error(f"unexpected {val or 'end of input'!r}")


def parse(text: str) -> Node:
    """Parse ``text`` into an AST; errors carry ``line:column``."""
    return _Parser(text).parse()


# -----------------------------------------------------------------------------
# printing
# -----------------------------------------------------------------------------

def _num_text(v: Fraction) -> str:
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def to_text(node: Node) -> str:
    """Print an AST so that ``parse(to_text(n)) == n``."""
    if isinstance(node, Num):
        return _num_text(node.value)
    if isinstance(node, Atom):
        return node.name
    if isinstance(node, Apply):
        return f"{node.fname}({to_text(node.arg)})"
    if isinstance(node, Power):
        b = to_text(node.base)
        if not isinstance(node.base, (Num, Atom, Apply)):
            b = f"({b})"
        return f"{b}^{node.exp}"
    if isinstance(node, Product):
        parts = []
        for f in node.factors:
            s = to_text(f)
            parts.append(f"({s})" if isinstance(f, (Sum, Product, Neg)) else s)
        return "*".join(parts)
    if isinstance(node, Neg):
        s = to_text(node.operand)
        if isinstance(node.operand, (Sum, Neg)):
            s = f"({s})"
        return f"-{s}"
    if isinstance(node, Sum):
        out = []
        for j, (sign, t) in enumerate(node.terms):
            s = to_text(t)
            if isinstance(t, Sum):
                s = f"({s})"
            out.append(s if j == 0 else f" {sign} {s}")
        return "".join(out)
    raise TypeError(node)


# -----------------------------------------------------------------------------
# evaluation
# -----------------------------------------------------------------------------

Value = Union[AlgebraElement, DoubledElement, FormElement]


def _mul(a: Value, b: Value) -> Value:
    if isinstance(a, FormElement) and isinstance(b, FormElement):
        raise EvalError("product of two 1-forms: degree exceeds 1")
    if isinstance(a, FormElement):
        return a.rmul(b)
    if isinstance(b, FormElement):
        return b.lmul(a)
    if isinstance(a, AlgebraElement) and isinstance(b, DoubledElement):
        return DoubledElement.diag(a) * b
    return a * b


def _add(a: Value, b: Value) -> Value:
    if isinstance(a, FormElement) != isinstance(b, FormElement):
        raise EvalError("cannot add a form and an algebra element")
    if isinstance(a, AlgebraElement) and isinstance(b, DoubledElement):
        return DoubledElement.diag(a) + b
    try:
        return a + b
    except ValueError as exc:
        raise EvalError(str(exc)) from exc


def _neg(a: Value) -> Value:
    return -a


def evaluate(node: Node, params: Optional[Params] = None) -> Value:
    """Evaluate an AST to a canonical algebra, doubled or form element."""
    p = params or Params()
    q = p.q
    if isinstance(node, Num):
        return AlgebraElement.scalar(node.value, q)
    if isinstance(node, Atom):
        if node.name == "i":
            return AlgebraElement.scalar(CplxRat(0, 1), q)
        return AlgebraElement.gen(node.name, q)
    if isinstance(node, Power):
        base = evaluate(node.base, p)
        if isinstance(base, FormElement):
            if node.exp != 1:
                raise EvalError("powers of forms other than 1: degree exceeds 1")
            return base
        try:
            return base**node.exp
        except ValueError as exc:
            raise EvalError(str(exc)) from exc
    if isinstance(node, Product):
        out = evaluate(node.factors[0], p)
        for f in node.factors[1:]:
            try:
                out = _mul(out, evaluate(f, p))
            except ValueError as exc:
                raise EvalError(str(exc)) from exc
        return out
    if isinstance(node, Neg):
        return _neg(evaluate(node.operand, p))
    if isinstance(node, Sum):
        out = None
        for sign, t in node.terms:
            v = evaluate(t, p)
            v = v if sign == "+" else _neg(v)
            out = v if out is None else _add(out, v)
        return out
    if isinstance(node, Apply):
        arg = evaluate(node.arg, p)
        return _apply(node.fname, arg)
    raise TypeError(node)


def _apply(fname: str, arg: Value) -> Value:
    try:
        if fname == "star":
            if isinstance(arg, AlgebraElement):
                return involute(arg)
            return arg.star()
        if isinstance(arg, FormElement):
            raise EvalError(f"{fname} of a 1-form: degree exceeds 1")
        if fname == "eR1":
            return derive_eR1(arg)
        if fname in ("dR",):
            return differential(arg, "dR")
        if isinstance(arg, DoubledElement):
            raise EvalError(f"{fname} needs a single-copy algebra element")
        if fname == "e1":
            return derive_e1(arg)
        if fname == "eb1":
            return derive_e1bar(arg)
        if fname == "d":
            return differential(arg, "d")
        if fname == "db":
            return differential(arg, "dbar")
    except EvalError:
        raise
    except ValueError as exc:
        raise EvalError(str(exc)) from exc
    raise EvalError(f"unknown function {fname!r}")


def evaluate_text(text: str, params: Optional[Params] = None) -> Value:
    return evaluate(parse(text), params)


def canonical_text(value: Value) -> str:
    return str(value)
