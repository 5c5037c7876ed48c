"""Textual operator-expression language.

Grammar (whitespace-insensitive)::

    expr   := ('+'|'-')? term (('+'|'-') term)*
    term   := factor ('*' factor)*
    factor := atom ('^' '-'? int)?
    atom   := 'x1'|'x2'|'x3'|'p1'|'p2'|'p3'|'|p|'|'i'|'hbar'|'t'
            | rational | '(' expr ')' | '[' expr ',' expr ']'
    rational := int ('/' posint)?

Commutator brackets are sugar for AB - BA.  '|p|' is the single
multi-character atom; there is no implicit multiplication.  Negative
exponents are admitted only for '|p|' and 't' (both invertible scalars
of the algebra); rational literals keep lowering exact.

The same module renders normal forms back to canonical text, so parser,
symbolic engine and numeric engine can be composed and cross-checked.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from . import operators as ops
from .grids import GridSpec
from .ncalg import Coefficient, NCMonomial, NCPoly, commutator, nc_mul

ATOMS = ("x1", "x2", "x3", "p1", "p2", "p3", "abs_p", "i", "hbar", "t")
NEGATIVE_POWER_OK = ("abs_p", "t")


class ParseError(ValueError):
    """Malformed DSL input, with the byte offset of the offending token."""

    def __init__(self, message: str, offset: int, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.message = message
        self.offset = offset
        self.line = line
        self.column = column


# -- AST -------------------------------------------------------------------------


@dataclass(frozen=True)
class Name:
    ident: str

    def __post_init__(self) -> None:
        if self.ident not in ATOMS:
            raise ValueError(f"unknown atom {self.ident!r}")


@dataclass(frozen=True)
class Rational:
    value: Fraction

    def __post_init__(self) -> None:
        if self.value < 0:
            raise ValueError("rational literals are nonnegative; signs live in sums")


@dataclass(frozen=True)
class Power:
    base: "Ast"
    exp: int

    def __post_init__(self) -> None:
        if self.exp < 0 and not (isinstance(self.base, Name) and self.base.ident in NEGATIVE_POWER_OK):
            raise ValueError("negative exponents are only defined for |p| and t")


@dataclass(frozen=True)
class Product:
    factors: tuple

    def __post_init__(self) -> None:
        if len(self.factors) < 2:
            raise ValueError("a product needs at least two factors")


@dataclass(frozen=True)
class Sum:
    terms: tuple  # of (sign, Ast), sign in {+1, -1}

    def __post_init__(self) -> None:
        if not self.terms:
            raise ValueError("empty sum")
        if len(self.terms) == 1 and self.terms[0][0] == 1:
            raise ValueError("a single-term sum must be a negation")


@dataclass(frozen=True)
class Commutator:
    lhs: "Ast"
    rhs: "Ast"


Ast = Union[Name, Rational, Power, Product, Sum, Commutator]


# -- tokenizer ---------------------------------------------------------------------

_PUNCT = set("+-*^()[],/")


@dataclass(frozen=True)
class _Tok:
    kind: str  # 'name' | 'int' | punctuation | 'end'
    text: str
    offset: int
    line: int
    column: int


def _tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    i, line, col = 0, 1, 1
    n = len(text)

    def err(msg: str, off: int, ln: int, cl: int):
        raise ParseError(msg, off, ln, cl)

    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch.isspace():
            i += 1
            col += 1
            continue
        start, sl, sc = i, line, col
        if ch == "|":
            if text[i : i + 3] == "|p|":
                toks.append(_Tok("name", "abs_p", start, sl, sc))
                i += 3
                col += 3
                continue
            err("expected '|p|'", start, sl, sc)
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            toks.append(_Tok("int", text[i:j], start, sl, sc))
            col += j - i
            i = j
            continue
        if ch.isalpha():
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            if word not in ATOMS:
                err(f"unknown symbol {word!r}", start, sl, sc)
            toks.append(_Tok("name", word, start, sl, sc))
            col += j - i
            i = j
            continue
        if ch in _PUNCT:
            toks.append(_Tok(ch, ch, start, sl, sc))
            i += 1
            col += 1
            continue
        err(f"unexpected character {ch!r}", start, sl, sc)
    toks.append(_Tok("end", "", n, line, col))
    return toks


# -- parser ------------------------------------------------------------------------


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.pos = 0

    def peek(self) -> _Tok:
        return self.toks[self.pos]

    def take(self) -> _Tok:
        tok = self.toks[self.pos]
        self.pos += 1
        return tok

    def error(self, msg: str, tok: _Tok | None = None):
        tok = tok or self.peek()
        raise ParseError(msg, tok.offset, tok.line, tok.column)

    def parse(self) -> Ast:
        node = self.expr()
        if self.peek().kind != "end":
            self.error(f"unexpected {self.peek().text!r} after expression")
        return node

    def expr(self) -> Ast:
        terms: list[tuple[int, Ast]] = []
        sign = 1
        if self.peek().kind in ("+", "-"):
            sign = 1 if self.take().kind == "+" else -1
        terms.append((sign, self.term()))
        while self.peek().kind in ("+", "-"):
            sign = 1 if self.take().kind == "+" else -1
            terms.append((sign, self.term()))
        if len(terms) == 1 and terms[0][0] == 1:
            return terms[0][1]
        return Sum(tuple(terms))

    def term(self) -> Ast:
        factors = [self.factor()]
        while self.peek().kind == "*":
            self.take()
            factors.append(self.factor())
        if len(factors) == 1:
            return factors[0]
        return Product(tuple(factors))

    def factor(self) -> Ast:
        base = self.atom()
        if self.peek().kind != "^":
            return base
        self.take()
        neg = False
        if self.peek().kind == "-":
            neg = True
            minus_tok = self.take()
        if self.peek().kind != "int":
            self.error("expected integer exponent")
        tok = self.take()
        exp = -int(tok.text) if neg else int(tok.text)
        if exp < 0 and not (isinstance(base, Name) and base.ident in NEGATIVE_POWER_OK):
            self.error("negative exponents are only defined for |p| and t", minus_tok)
        return Power(base, exp)

    def atom(self) -> Ast:
        tok = self.peek()
        if tok.kind == "name":
            self.take()
            return Name(tok.text)
        if tok.kind == "int":
            self.take()
            num = int(tok.text)
            if self.peek().kind == "/":
                self.take()
                dtok = self.peek()
                if dtok.kind != "int":
                    self.error("expected integer denominator")
                self.take()
                den = int(dtok.text)
                if den == 0:
                    self.error("zero denominator", dtok)
                return Rational(Fraction(num, den))
            return Rational(Fraction(num))
        if tok.kind == "(":
            self.take()
            inner = self.expr()
            if self.peek().kind != ")":
                self.error("expected ')'")
            self.take()
            return inner
        if tok.kind == "[":
            self.take()
            lhs = self.expr()
            if self.peek().kind != ",":
                self.error("expected ',' in commutator")
            self.take()
            rhs = self.expr()
            if self.peek().kind != "]":
                self.error("expected ']'")
            self.take()
            return Commutator(lhs, rhs)
        self.error(f"expected an atom, found {tok.text or 'end of input'!r}")


def parse(text: str) -> Ast:
    """Parse DSL text; raises ParseError with precise location."""
    return _Parser(text).parse()


# -- formatter -----------------------------------------------------------------------

_NAME_TEXT = {name: name for name in ATOMS}
_NAME_TEXT["abs_p"] = "|p|"


def _fmt_atom(node: Ast) -> str:
    """Render a node at atom precedence, parenthesizing when required."""
    if isinstance(node, (Sum, Product, Power)):
        return f"({format_ast(node)})"
    return format_ast(node)


def format_ast(node: Ast) -> str:
    """Canonical text; parse(format_ast(a)) is structurally equal to a."""
    if isinstance(node, Name):
        return _NAME_TEXT[node.ident]
    if isinstance(node, Rational):
        v = node.value
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(node, Power):
        base = node.base
        if isinstance(base, (Sum, Product, Power)):
            return f"({format_ast(base)})^{node.exp}"
        return f"{format_ast(base)}^{node.exp}"
    if isinstance(node, Product):
        return "*".join(_fmt_atom(f) if isinstance(f, (Sum, Product)) else format_ast(f)
                        for f in node.factors)
    if isinstance(node, Sum):
        parts = []
        for k, (sign, term) in enumerate(node.terms):
            text = _fmt_atom(term) if isinstance(term, Sum) else format_ast(term)
            if k == 0:
                parts.append(text if sign > 0 else f"-{text}")
            else:
                parts.append(f" + {text}" if sign > 0 else f" - {text}")
        return "".join(parts)
    if isinstance(node, Commutator):
        return f"[{format_ast(node.lhs)}, {format_ast(node.rhs)}]"
    raise TypeError(f"not an AST node: {node!r}")


# -- lowering to the exact algebra ------------------------------------------------------

_GEN = {
    "x1": NCPoly.x(1), "x2": NCPoly.x(2), "x3": NCPoly.x(3),
    "p1": NCPoly.p(1), "p2": NCPoly.p(2), "p3": NCPoly.p(3),
    "abs_p": NCPoly.r(1),
    "i": NCPoly.scalar(0, 1),
    "hbar": NCPoly.scalar(1, 0, hbar_pow=1),
    "t": NCPoly.scalar(1, 0, t_pow=1),
}


def lower(node: Ast) -> NCPoly:
    """Structural translation into the normal-ordered algebra."""
    if isinstance(node, Name):
        return _GEN[node.ident]
    if isinstance(node, Rational):
        return NCPoly.scalar(node.value)
    if isinstance(node, Power):
        if node.exp < 0:
            ident = node.base.ident  # Name guaranteed by the AST invariant
            if ident == "abs_p":
                return NCPoly.r(node.exp)
            return NCPoly.scalar(1, 0, t_pow=node.exp)
        out = NCPoly.scalar(1)
        base = lower(node.base)
        for _ in range(node.exp):
            out = nc_mul(out, base)
        return out
    if isinstance(node, Product):
        out = lower(node.factors[0])
        for f in node.factors[1:]:
            out = nc_mul(out, lower(f))
        return out
    if isinstance(node, Sum):
        out = NCPoly.zero()
        for sign, term in node.terms:
            low = lower(term)
            out = out + low if sign > 0 else out - low
        return out
    if isinstance(node, Commutator):
        return commutator(lower(node.lhs), lower(node.rhs))
    raise TypeError(f"not an AST node: {node!r}")


# -- compiling to numeric pipelines ------------------------------------------------------


def compile_ast(node: Ast, grid: GridSpec, t_value: float) -> ops.OperatorExpr:
    """Map the AST onto a spectral pipeline, substituting t_value for t."""
    if isinstance(node, Name):
        ident = node.ident
        if ident in ("x1", "x2", "x3"):
            return ops.build(ops.Position(int(ident[1])))
        if ident in ("p1", "p2", "p3"):
            return ops.build(ops.Momentum(int(ident[1])))
        if ident == "abs_p":
            return ops.build(ops.AbsPPow(1))
        if ident == "i":
            return ops.Scale(1j)
        if ident == "hbar":
            return ops.Scale(grid.hbar)
        return ops.Scale(complex(t_value))
    if isinstance(node, Rational):
        return ops.Scale(complex(node.value))
    if isinstance(node, Power):
        if isinstance(node.base, Name) and node.base.ident == "abs_p":
            return ops.build(ops.AbsPPow(node.exp))
        if isinstance(node.base, Name) and node.base.ident == "t":
            if node.exp < 0 and t_value == 0:
                raise ZeroDivisionError("time parameter must be nonzero")
            return ops.Scale(complex(t_value) ** node.exp)
        if node.exp == 0:
            return ops.Scale(1.0)
        inner = compile_ast(node.base, grid, t_value)
        return ops.compose(*([inner] * node.exp))
    if isinstance(node, Product):
        return ops.compose(*(compile_ast(f, grid, t_value) for f in node.factors))
    if isinstance(node, Sum):
        parts = []
        for sign, term in node.terms:
            inner = compile_ast(term, grid, t_value)
            parts.append(inner if sign > 0 else ops.compose(ops.Scale(-1.0), inner))
        return parts[0] if len(parts) == 1 else ops.op_sum(*parts)
    if isinstance(node, Commutator):
        a = compile_ast(node.lhs, grid, t_value)
        b = compile_ast(node.rhs, grid, t_value)
        return ops.op_sum(ops.compose(a, b), ops.compose(ops.Scale(-1.0), b, a))
    raise TypeError(f"not an AST node: {node!r}")


# -- normal form back to text --------------------------------------------------------------


def _coeff_factors(re: Fraction, im: Fraction) -> tuple[int, list[Ast]]:
    """Split a Gaussian rational into a sign and atom factors."""
    if im == 0:
        sign = 1 if re >= 0 else -1
        mag = abs(re)
        return sign, [] if mag == 1 else [Rational(mag)]
    if re == 0:
        sign = 1 if im >= 0 else -1
        mag = abs(im)
        out: list[Ast] = [] if mag == 1 else [Rational(mag)]
        return sign, out + [Name("i")]
    sign = 1 if re > 0 else -1
    a, b = abs(re), im if sign > 0 else -im
    left: Ast = Rational(a)
    right: Ast = Name("i") if abs(b) == 1 else Product((Rational(abs(b)), Name("i")))
    return sign, [Sum(((1, left), (1 if b > 0 else -1, right)))]


def poly_to_ast(poly: NCPoly) -> Ast:
    """Canonical AST of a normal form (deterministic term order)."""
    if poly.is_zero():
        return Rational(Fraction(0))
    terms: list[tuple[int, Ast]] = []
    for m in poly.monomials():
        sign, factors = _coeff_factors(m.coeff.re, m.coeff.im)
        if m.coeff.hbar_pow:
            h = Name("hbar")
            factors.append(h if m.coeff.hbar_pow == 1 else Power(h, m.coeff.hbar_pow))
        if m.coeff.t_pow:
            factors.append(Name("t") if m.coeff.t_pow == 1 else Power(Name("t"), m.coeff.t_pow))
        for axis, e in enumerate(m.x_exp):
            if e:
                nm = Name(f"x{axis + 1}")
                factors.append(nm if e == 1 else Power(nm, e))
        for axis, e in enumerate(m.p_exp):
            if e:
                nm = Name(f"p{axis + 1}")
                factors.append(nm if e == 1 else Power(nm, e))
        if m.r_pow:
            nm = Name("abs_p")
            factors.append(nm if m.r_pow == 1 else Power(nm, m.r_pow))
        if not factors:
            node: Ast = Rational(Fraction(1))
        elif len(factors) == 1:
            node = factors[0]
        else:
            node = Product(tuple(factors))
        terms.append((sign, node))
    if len(terms) == 1 and terms[0][0] == 1:
        return terms[0][1]
    return Sum(tuple(terms))


def render_poly(poly: NCPoly) -> str:
    """Canonical text of a normal form."""
    return format_ast(poly_to_ast(poly))
