"""Surface syntax for scalars and noncommutative polynomials.

Grammar::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := ("-" | "+") unary | power
    power  := atom ("^" ["-"] INT | "^" "(" ["-"] INT ")")?
    atom   := NUMBER | NUMBER "i" | IDENT | "(" expr ")"

``*`` is noncommutative.  ``q``, ``s`` and ``i`` are scalar constants, as is
``p`` once a :class:`PMode` is supplied.  Division is only by scalars.  A
rational literal ``a/b`` directly written as digits is read as one number.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .scalar import I, ONE, S, Scalar, GaussianRational, as_scalar, q as Q_SCALAR

__all__ = [
    "ExprSyntaxError",
    "UnknownSymbol",
    "Num",
    "Sym",
    "Neg",
    "BinOp",
    "Pow",
    "parse_ast",
    "print_ast",
    "parse_scalar",
    "parse_terms",
    "parse_expression",
    "format_terms",
]

RESERVED = ("q", "s", "i", "p")


class ExprSyntaxError(ValueError):
    def __init__(self, message, text="", pos=0):
        super().__init__(f"{message} at position {pos}" + (f" in {text!r}" if text else ""))
        self.pos = pos
        self.text = text


class UnknownSymbol(ExprSyntaxError):
    pass


# -- AST -------------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: GaussianRational


@dataclass(frozen=True)
class Sym:
    name: str
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Neg:
    arg: object


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Pow:
    base: object
    exp: int


_TOKEN = re.compile(
    r"\s*(?:(?P<rat>\d+/\d+(?![\d]))|(?P<imag>\d+i(?![A-Za-z0-9_]))|(?P<num>\d+)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^()]))")


def _tokenize(text):
    pos = 0
    toks = []
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}", text, pos)
        start = m.start(m.lastgroup)
        kind = m.lastgroup
        val = m.group(kind)
        if kind == "rat" and toks and toks[-1][0] == "op" and toks[-1][1] == "^":
            # exponent position: only the integer part belongs to the exponent
            num = val.split("/")[0]
            toks.append(("num", num, start))
            pos = start + len(num)
            continue
        toks.append((kind, val, start))
        pos = m.end()
    toks.append(("end", "", n))
    return toks


class _Parser:
    def __init__(self, text):
        self.text = text
        self.toks = _tokenize(text)
        self.k = 0

    def peek(self):
        return self.toks[self.k]

    def take(self):
        t = self.toks[self.k]
        self.k += 1
        return t

    def expect(self, val):
        t = self.take()
        if t[1] != val:
            raise ExprSyntaxError(f"expected {val!r}, found {t[1] or 'end of input'!r}",
                                  self.text, t[2])
        return t

    def parse(self):
        if self.peek()[0] == "end":
            raise ExprSyntaxError("empty expression", self.text, 0)
        node = self.expr()
        t = self.peek()
        if t[0] != "end":
            raise ExprSyntaxError(f"unexpected {t[1]!r}", self.text, t[2])
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        t = self.peek()
        if t[0] == "op" and t[1] == "-":
            self.take()
            return Neg(self.unary())
        if t[0] == "op" and t[1] == "+":
            self.take()
            return self.unary()
        return self.power()

    def _int(self):
        neg = False
        t = self.peek()
        if t[0] == "op" and t[1] == "-":
            self.take()
            neg = True
        t = self.take()
        if t[0] != "num":
            raise ExprSyntaxError("exponent must be an integer", self.text, t[2])
        v = int(t[1])
        return -v if neg else v

    def power(self):
        base = self.atom()
        t = self.peek()
        if t[0] == "op" and t[1] == "^":
            self.take()
            if self.peek()[1] == "(":
                self.take()
                e = self._int()
                self.expect(")")
            else:
                e = self._int()
            return Pow(base, e)
        return base

    def atom(self):
        t = self.take()
        kind, val, pos = t
        if kind == "num":
            return Num(GaussianRational(int(val)))
        if kind == "rat":
            return Num(GaussianRational(Fraction(val)))
        if kind == "imag":
            return Num(GaussianRational(0, int(val[:-1])))
        if kind == "ident":
            return Sym(val, pos)
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect(")")
            return node
        raise ExprSyntaxError(f"unexpected {val or 'end of input'!r}", self.text, pos)


def parse_ast(text: str):
    return _Parser(text).parse()


def _num_str(g: GaussianRational) -> str:
    if not g.im:
        return str(g.re) if g.re >= 0 else f"({g.re})"
    if not g.re and g.im > 0 and g.im.denominator == 1:
        return f"{g.im}i"
    sign = "-" if g.im < 0 else "+"
    return f"({g.re} {sign} {abs(g.im)}*i)"


def print_ast(node) -> str:
    """Fully parenthesized text that parses back to the same tree."""
    if isinstance(node, Num):
        return _num_str(node.value)
    if isinstance(node, Sym):
        return node.name
    if isinstance(node, Neg):
        return f"-({print_ast(node.arg)})"
    if isinstance(node, Pow):
        return f"({print_ast(node.base)})^({node.exp})"
    if isinstance(node, BinOp):
        return f"({print_ast(node.left)} {node.op} {print_ast(node.right)})"
    raise TypeError(node)


# -- evaluation --------------------------------------------------------------


def _scalar_symbol(name, pmode):
    if name == "q":
        return Q_SCALAR
    if name == "s":
        return S
    if name == "i":
        return I
    if name == "p" and pmode is not None:
        return pmode.p(1)
    return None


def _mul_terms(a, b):
    out = {}
    for wa, ca in a.items():
        for wb, cb in b.items():
            w = wa + wb
            v = out.get(w)
            t = ca * cb
            v = t if v is None else v + t
            if v:
                out[w] = v
            else:
                out.pop(w, None)
    return out


def _add_terms(a, b, sign=1):
    out = dict(a)
    for w, c in b.items():
        v = out.get(w)
        t = c if sign > 0 else -c
        v = t if v is None else v + t
        if v:
            out[w] = v
        else:
            out.pop(w, None)
    return out


def _scalar_of(terms):
    if not terms:
        return Scalar(0)
    if set(terms) == {()}:
        return terms[()]
    return None


def _eval(node, text, pres, pmode):
    """Evaluate to a raw terms dict ``{word: Scalar}`` (no normalization)."""
    if isinstance(node, Num):
        c = as_scalar(node.value)
        return {(): c} if c else {}
    if isinstance(node, Sym):
        if pres is not None and node.name in pres.index:
            return {(pres.index[node.name],): ONE}
        sc = _scalar_symbol(node.name, pmode)
        if sc is not None:
            return {(): sc}
        if node.name == "p":
            raise UnknownSymbol("'p' needs a p mode (p=q or p=q^-1)", text, node.pos)
        raise UnknownSymbol(f"unknown symbol {node.name!r}", text, node.pos)
    if isinstance(node, Neg):
        return {w: -c for w, c in _eval(node.arg, text, pres, pmode).items()}
    if isinstance(node, BinOp):
        a = _eval(node.left, text, pres, pmode)
        b = _eval(node.right, text, pres, pmode)
        if node.op == "+":
            return _add_terms(a, b)
        if node.op == "-":
            return _add_terms(a, b, -1)
        if node.op == "*":
            return _mul_terms(a, b)
        if node.op == "/":
            d = _scalar_of(b)
            if d is None:
                raise ExprSyntaxError("division by a non-scalar", text, 0)
            if not d:
                raise ZeroDivisionError(f"division by zero in {text!r}")
            inv = d.inverse()
            return {w: c * inv for w, c in a.items()}
    if isinstance(node, Pow):
        base = _eval(node.base, text, pres, pmode)
        e = node.exp
        sc = _scalar_of(base)
        if sc is not None:
            v = sc ** e
            return {(): v} if v else {}
        if e < 0:
            if len(base) != 1:
                raise ExprSyntaxError("negative power of a sum", text, 0)
            (w, c), = base.items()
            if any(a not in pres.inverse for a in w):
                bad = next(pres.names[a] for a in w if a not in pres.inverse)
                pos = node.base.pos if isinstance(node.base, Sym) else 0
                raise ExprSyntaxError(f"negative exponent on non-invertible generator {bad!r}",
                                      text, pos)
            base = {tuple(pres.inverse[a] for a in reversed(w)): c.inverse()}
            e = -e
        out = {(): ONE}
        for _ in range(e):
            out = _mul_terms(out, base)
        return out
    raise TypeError(node)


def parse_scalar(text: str, pmode=None) -> Scalar:
    terms = _eval(parse_ast(text), text, None, pmode)
    return _scalar_of(terms)


def parse_terms(text: str, pres, pmode=None) -> dict:
    """Raw (unnormalized) terms of an expression."""
    return _eval(parse_ast(text), text, pres, pmode)


def parse_expression(text: str, pres, pmode=None):
    """Parse and normalize an expression in ``pres``."""
    return pres.poly(parse_terms(text, pres, pmode))


# -- printing ----------------------------------------------------------------


def _coeff_parts(c: Scalar):
    """(sign, text) where text is '' for a unit coefficient."""
    if c.is_monomial():
        (e, g), = c.num.items()
        if not g.im or not g.re:
            neg = (g.re < 0) if not g.im else (g.im < 0)
            mag = -c if neg else c
            txt = str(mag)
            return ("-" if neg else "+"), ("" if txt == "1" else txt)
    return "+", f"({c})"


def format_terms(pres, terms: dict) -> str:
    if not terms:
        return "0"
    items = sorted(terms.items(), key=lambda kv: pres.order_key(kv[0]), reverse=True)
    out = []
    for k, (w, c) in enumerate(items):
        sign, ctxt = _coeff_parts(c)
        wtxt = pres.word_str(w) if w else ""
        if wtxt and ctxt:
            body = f"{ctxt}*{wtxt}"
        else:
            body = ctxt or wtxt or "1"
        if k == 0:
            out.append(("-" if sign == "-" else "") + body)
        else:
            out.append(f" {sign} {body}")
    return "".join(out)
