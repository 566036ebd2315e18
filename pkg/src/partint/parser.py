"""Recursive-descent parsers for the function and set mini-languages.

Function grammar::

    function  := [NAME "(" vars ")" "="] expr clause*
    clause    := "null_modify" "(" nullset "," expr ")"
    nullset   := "rationals" | "points" "[" point ("," point)* "]"
    expr      := term (("+" | "-") term)*
    term      := unary (("*" | "/") unary)*
    unary     := "-" unary | power
    power     := atom ["^" unary]
    atom      := NUMBER | VAR | FUNC "(" expr ["," expr] ")" | "(" expr ")"
               | "piecewise" "{" piece (";" piece)* [";"] "}" ["else" expr]
    piece     := BOX ":" expr

Set grammar::

    set       := primary ("&" primary)*
    primary   := "box" BOXES
               | "level" expr (">" | "<") NUMBER "in" BOX
               | "complement" "(" BOX "," set ")"
               | "union" "(" set ("," set)* ")"
               | "nullmod" "(" set "," nullset ["in" BOX] ")"
               | "null" "(" nullset ["in" BOX] ")"
               | "(" set ")"

Numbers are decimals, ``p/q`` fractions or ``p/2^k`` dyadics (constant
subexpressions are folded exactly).  Boxes are written ``(a,b)x(c,d)`` and
unions of boxes join them with ``|``.  Variables default to ``x, y, z, w``.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .expr import (
    Abs,
    Add,
    Const,
    Coord,
    Div,
    Expr,
    Func,
    Max,
    Min,
    Mul,
    Neg,
    Piecewise,
    Pow,
    Sub,
)
from .funcrep import FunctionRep, Modification, function
from .geometry import Box, BoxUnion, parse_box, union_normalize
from .nullset import FinitePoints, NullCertificate, rationals_in, union_null

DEFAULT_VARS = ("x", "y", "z", "w")
FUNCS = {"exp", "log", "sin", "cos", "sqrt", "abs", "min", "max"}
KEYWORDS = FUNCS | {"piecewise", "else", "null_modify", "rationals", "points"}


class ParseError(ValueError):
    def __init__(self, message: str, text: str, start: int, end: int | None = None):
        self.message = message
        self.text = text
        self.start = start
        self.end = max(end if end is not None else start + 1, start + 1)
        super().__init__(self.render())

    @property
    def span(self) -> tuple[int, int]:
        return self.start, self.end

    def render(self) -> str:
        caret = " " * self.start + "^" * max(1, min(self.end, len(self.text) + 1) - self.start)
        return f"{self.message} at {self.start}:{self.end}\n  {self.text}\n  {caret}"


_NUMBER = re.compile(r"\d+(?:\.\d*)?(?:[eE][-+]?\d+)?|\.\d+(?:[eE][-+]?\d+)?")
_NAME = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")
_IV = r"\(\s*-?[^,()]+,\s*-?[^,()]+\)"
_BOX = re.compile(_IV + r"(?:\s*x\s*" + _IV + r")*")


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self, s: str) -> bool:
        self.ws()
        return self.text.startswith(s, self.pos)

    def peek_word(self, w: str) -> bool:
        self.ws()
        m = _NAME.match(self.text, self.pos)
        return m is not None and m.group() == w

    def accept(self, s: str) -> bool:
        if self.peek(s):
            self.pos += len(s)
            return True
        return False

    def accept_word(self, w: str) -> bool:
        if self.peek_word(w):
            self.pos += len(w)
            return True
        return False

    def expect(self, s: str):
        if not self.accept(s):
            self.fail(f"expected '{s}'")

    def expect_word(self, w: str):
        if not self.accept_word(w):
            self.fail(f"expected '{w}'")

    def at_end(self) -> bool:
        self.ws()
        return self.pos >= len(self.text)

    def fail(self, msg: str, start: int | None = None, end: int | None = None):
        self.ws()
        s = self.pos if start is None else start
        if end is None:
            m = re.compile(r"\S+").match(self.text, s)
            end = m.end() if m else s + 1
        raise ParseError(msg, self.text, s, end)

    def name(self) -> tuple[str, int]:
        self.ws()
        m = _NAME.match(self.text, self.pos)
        if not m:
            self.fail("expected a name")
        self.pos = m.end()
        return m.group(), m.start()

    def number(self) -> Fraction:
        self.ws()
        start = self.pos
        neg = self.accept("-")
        self.ws()
        m = _NUMBER.match(self.text, self.pos)
        if not m:
            self.fail("expected a number", start)
        self.pos = m.end()
        v = Fraction(m.group())
        if self.accept("/"):
            self.ws()
            d = _NUMBER.match(self.text, self.pos)
            if not d:
                self.fail("expected a denominator")
            self.pos = d.end()
            den = Fraction(d.group())
            if self.accept("^"):
                self.ws()
                e = re.compile(r"\d+").match(self.text, self.pos)
                if not e:
                    self.fail("expected an exponent")
                self.pos = e.end()
                den = den ** int(e.group())
            if den == 0:
                self.fail("division by zero", start, self.pos)
            v = v / den
        return -v if neg else v

    def box(self) -> Box:
        self.ws()
        m = _BOX.match(self.text, self.pos)
        if not m:
            self.fail("expected a box like (a,b)x(c,d)")
        try:
            b = parse_box(m.group())
        except ValueError as exc:
            raise ParseError(f"bad box: {exc}", self.text, m.start(), m.end()) from None
        self.pos = m.end()
        return b

    def boxes(self) -> BoxUnion:
        out = [self.box()]
        while self.accept("|"):
            out.append(self.box())
        if len({b.dim for b in out}) > 1:
            self.fail("boxes of different dimensions")
        return union_normalize(out, out[0].dim)


# -- constant folding ---------------------------------------------------------------


def _fold(node: Expr) -> Expr:
    if isinstance(node, (Add, Sub, Mul, Div)) and isinstance(node.a, Const) and isinstance(node.b, Const):
        a, b = node.a.value, node.b.value
        if isinstance(node, Add):
            return Const(a + b)
        if isinstance(node, Sub):
            return Const(a - b)
        if isinstance(node, Mul):
            return Const(a * b)
        if b != 0:
            return Const(a / b)
    if isinstance(node, Neg) and isinstance(node.a, Const):
        return Const(-node.a.value)
    if isinstance(node, Pow) and isinstance(node.base, Const) and node.exponent.denominator == 1:
        if node.base.value != 0 or node.exponent >= 0:
            return Const(node.base.value ** int(node.exponent))
    return node


class _ExprParser:
    def __init__(self, sc: _Scanner, variables):
        self.sc = sc
        self.vars = {v: i for i, v in enumerate(variables)}

    def expr(self) -> Expr:
        node = self.term()
        while True:
            if self.sc.accept("+"):
                node = _fold(Add(node, self.term()))
            elif self.sc.accept("-"):
                node = _fold(Sub(node, self.term()))
            else:
                return node

    def term(self) -> Expr:
        node = self.unary()
        while True:
            if self.sc.accept("*"):
                node = _fold(Mul(node, self.unary()))
            elif self.sc.accept("/"):
                self.sc.ws()
                start = self.sc.pos
                den = self.unary()
                if isinstance(den, Const) and den.value == 0:
                    self.sc.fail("division by zero", start, self.sc.pos)
                node = _fold(Div(node, den))
            else:
                return node

    def unary(self) -> Expr:
        if self.sc.accept("-"):
            return _fold(Neg(self.unary()))
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.sc.accept("^"):
            start = self.sc.pos
            ex = self.unary()
            if not isinstance(ex, Const):
                self.sc.fail("exponent must be a constant", start, self.sc.pos)
            return _fold(Pow(base, ex.value))
        return base

    def atom(self) -> Expr:
        sc = self.sc
        sc.ws()
        if sc.accept("("):
            node = self.expr()
            sc.expect(")")
            return node
        if _NUMBER.match(sc.text, sc.pos):
            m = _NUMBER.match(sc.text, sc.pos)
            sc.pos = m.end()
            return Const(Fraction(m.group()))
        if sc.peek_word("piecewise"):
            return self.piecewise()
        word, at = sc.name()
        if word in FUNCS:
            sc.expect("(")
            a = self.expr()
            if word in ("min", "max"):
                sc.expect(",")
                b = self.expr()
                sc.expect(")")
                return Min(a, b) if word == "min" else Max(a, b)
            sc.expect(")")
            if word == "abs":
                return Abs(a)
            if word == "sqrt":
                return Pow(a, Fraction(1, 2))
            return Func(word, a)
        if word in self.vars:
            return Coord(self.vars[word])
        sc.fail(f"unknown name '{word}'", at, at + len(word))

    def piecewise(self) -> Expr:
        sc = self.sc
        sc.expect_word("piecewise")
        sc.expect("{")
        pieces = []
        while not sc.peek("}"):
            b = sc.box()
            sc.expect(":")
            pieces.append((b, self.expr()))
            if not sc.accept(";"):
                break
        sc.expect("}")
        default = Const(Fraction(0))
        if sc.accept_word("else"):
            default = self.expr()
        dims = {b.dim for b, _ in pieces}
        if len(dims) > 1:
            sc.fail("piecewise boxes of different dimensions")
        return Piecewise(tuple(pieces), default)


def _null_clause(sc: _Scanner, region: BoxUnion | None, dim: int | None) -> NullCertificate:
    start = sc.pos
    if sc.accept_word("rationals"):
        if sc.accept_word("in"):
            region = BoxUnion([sc.box()])
        if region is None:
            sc.fail("rationals need a bounded region", start, sc.pos)
        if any(not b.is_bounded for b in region):
            sc.fail("rationals need a bounded region", start, sc.pos)
        return union_null([rationals_in(b) for b in region], region.dim)
    if sc.accept_word("points"):
        sc.expect("[")
        pts = []
        while True:
            sc.expect("(")
            p = [sc.number()]
            while sc.accept(","):
                p.append(sc.number())
            sc.expect(")")
            pts.append(tuple(p))
            if not sc.accept(","):
                break
        sc.expect("]")
        if len({len(p) for p in pts}) > 1 or (dim is not None and len(pts[0]) != dim):
            sc.fail("points of the wrong dimension", start, sc.pos)
        return FinitePoints(pts, len(pts[0]))
    sc.fail("expected 'rationals' or 'points[...]'")


def parse_expr(text: str, variables=DEFAULT_VARS) -> Expr:
    sc = _Scanner(text)
    node = _ExprParser(sc, variables).expr()
    if not sc.at_end():
        sc.fail("unexpected input")
    return node


def parse_function(text: str, domain=None, nonnegative: bool | None = None) -> FunctionRep:
    """Parse ``f(x,y) = expr null_modify(...)`` over ``domain`` (a box union or box text)."""
    sc = _Scanner(text)
    variables = DEFAULT_VARS
    save = sc.pos
    m = re.compile(r"\s*[A-Za-z_]\w*\s*\(([^()]*)\)\s*=(?!=)").match(text)
    if m:
        names = [v.strip() for v in m.group(1).split(",") if v.strip()]
        for v in names:
            if not _NAME.fullmatch(v) or v in KEYWORDS:
                raise ParseError(f"bad variable name '{v}'", text, m.start(1), m.end(1))
        if len(set(names)) != len(names):
            raise ParseError("repeated variable name", text, m.start(1), m.end(1))
        variables = tuple(names)
        sc.pos = m.end()
    else:
        sc.pos = save
    core = _ExprParser(sc, variables).expr()
    if isinstance(domain, str):
        ds = _Scanner(domain)
        domain = ds.boxes()
        if not ds.at_end():
            ds.fail("unexpected input in domain")
    elif isinstance(domain, Box):
        domain = BoxUnion([domain], domain.dim)
    if domain is None:
        raise ValueError("a domain is required")
    used = core.coords()
    if used and max(used) >= domain.dim:
        raise ParseError(f"function uses {max(used) + 1} variables on a {domain.dim}-dimensional domain",
                         text, 0, len(text))
    mods = []
    while sc.accept_word("null_modify"):
        sc.expect("(")
        cert = _null_clause(sc, domain, domain.dim)
        sc.expect(",")
        value = _ExprParser(sc, variables).expr()
        sc.expect(")")
        mods.append(Modification(cert, value))
        sc.accept(";")
    if not sc.at_end():
        sc.fail("unexpected input")
    f = function(core, domain, bool(nonnegative))
    if mods:
        f = FunctionRep(f.core, f.domain, tuple(mods), f.nonnegative)
    return f


# -- sets ----------------------------------------------------------------------------


class _SetParser:
    def __init__(self, sc: _Scanner):
        self.sc = sc

    def set(self):
        from .measure import Intersection

        parts = [self.primary()]
        while self.sc.accept("&"):
            parts.append(self.primary())
        if len(parts) == 1:
            return parts[0]
        if len({p.dim for p in parts}) > 1:
            self.sc.fail("intersection of sets of different dimensions")
        return Intersection(tuple(parts))

    def primary(self):
        from .measure import Boxes, ComplementWithin, LevelSet, NullModified, Union, null_set

        sc = self.sc
        sc.ws()
        if sc.accept_word("box"):
            return Boxes(sc.boxes())
        if sc.accept_word("level"):
            e = _ExprParser(sc, DEFAULT_VARS).expr()
            if sc.accept(">"):
                direction = ">"
            elif sc.accept("<"):
                direction = "<"
            else:
                sc.fail("expected '>' or '<'")
            a = sc.number()
            sc.expect_word("in")
            start = sc.pos
            region = sc.box()
            used = e.coords()
            if used and max(used) >= region.dim:
                sc.fail("expression uses more variables than the box has axes", start, sc.pos)
            return LevelSet(function(e, region), a, direction, region)
        if sc.accept_word("complement"):
            sc.expect("(")
            amb = sc.box()
            sc.expect(",")
            inner = self.set()
            sc.expect(")")
            return ComplementWithin(amb, inner)
        if sc.accept_word("union"):
            sc.expect("(")
            parts = [self.set()]
            while sc.accept(","):
                parts.append(self.set())
            sc.expect(")")
            return Union(tuple(parts))
        if sc.accept_word("nullmod"):
            sc.expect("(")
            inner = self.set()
            sc.expect(",")
            cert = _null_clause(sc, _bounded_window(inner), inner.dim)
            sc.expect(")")
            return NullModified(inner, cert)
        if sc.accept_word("null"):
            sc.expect("(")
            cert = _null_clause(sc, None, None)
            sc.expect(")")
            return null_set(cert)
        if sc.accept("("):
            s = self.set()
            sc.expect(")")
            return s
        sc.fail("expected a set (box, level, complement, union, nullmod, null)")


def _bounded_window(s) -> BoxUnion | None:
    w = s.window()
    if w.is_empty or not w.is_bounded:
        return None
    return BoxUnion([w], w.dim)


def parse_set(text: str):
    sc = _Scanner(text)
    s = _SetParser(sc).set()
    if not sc.at_end():
        sc.fail("unexpected input")
    return s
