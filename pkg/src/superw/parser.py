"""Expression parser for the command line: generator atoms, derivatives,
right-nested Wick products and scalar coefficients in Q(k).

The grammar accepts both the input syntax (`no(beta[1], d(gamma[1]))`,
`d^2(b[1])`, `-(1/6)*no(J[0,0],J[0,0],J[0,0])`) and the canonical printer
output (`:beta[1] dgamma[1]:`, `d^2b[1]`, `(1-k)/(2*k)*:b[1] c[1]:`), so
parsing is a left inverse of printing on canonical forms.
"""

from __future__ import annotations

import re

from .coeff import K, ONE, Scalar, sc
from .fields import FieldExpr


class ParseError(ValueError):
    def __init__(self, message, pos=None):
        if pos is not None:
            message = f"{message} (at position {pos})"
        super().__init__(message)
        self.pos = pos


_TOKEN_RE = re.compile(r"\s*([A-Za-z]+|\d+|\*\*|[\[\]():,+\-*/^])")


def tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            if text[pos:].strip():
                raise ParseError(f"bad character {text[pos:].lstrip()[0]!r}", pos)
            break
        tokens.append((m.group(1), m.start(1)))
        pos = m.end()
    tokens.append((None, len(text)))
    return tokens


class Context:
    """An algebra plus a rule mapping generator names and index tuples to
    fields.  The default rule is a direct registry lookup with integer
    indices; `J[a,k]` labels keep their first index as one of 0, 1, +, -."""

    def __init__(self, alg, resolve=None, tag=None, extra_names=()):
        self.alg = alg
        self._resolve = resolve
        self.tag = tag or alg.tag
        self._extra = frozenset(extra_names)

    def resolve(self, name, indices) -> FieldExpr:
        if self._resolve is not None:
            out = self._resolve(name, indices)
            if out is not None:
                return out
        try:
            return self.alg.gen(name, *indices)
        except KeyError:
            idx = ",".join(str(i) for i in indices)
            raise ParseError(f"unknown generator {name}[{idx}]" if indices else f"unknown generator {name}")

    def names(self):
        return {g.name for g in self.alg.gens} | self._extra


# Values during parsing are either pure scalars or fields; scalars stay
# symbolic until they multiply a field or the whole expression ends.
_S, _F = "s", "f"


def _to_field(ctx, v):
    kind, x = v
    return ctx.alg.scalar_field(x) if kind == _S else x


def _add(ctx, a, b, sign):
    if a[0] == _S and b[0] == _S:
        return (_S, a[1] + b[1] if sign > 0 else a[1] - b[1])
    fa, fb = _to_field(ctx, a), _to_field(ctx, b)
    return (_F, fa + fb if sign > 0 else fa - fb)


def _mul(a, b):
    if a[0] == _S and b[0] == _S:
        return (_S, a[1] * b[1])
    if a[0] == _S:
        return (_F, b[1].scale(a[1]))
    if b[0] == _S:
        return (_F, a[1].scale(b[1]))
    raise ParseError("cannot multiply two fields; use no(...) for Wick products")


def _div(a, b):
    if b[0] != _S:
        raise ParseError("can only divide by a scalar")
    if a[0] == _S:
        return (_S, a[1] / b[1])
    return (_F, a[1].scale(ONE / b[1]))


def _neg(a):
    return (_S, -a[1]) if a[0] == _S else (_F, -a[1])


class _Parser:
    def __init__(self, text, ctx):
        self.tokens = tokenize(text)
        self.i = 0
        self.ctx = ctx

    def peek(self):
        return self.tokens[self.i][0]

    def pos(self):
        return self.tokens[self.i][1]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok[0]

    def expect(self, tok):
        if self.peek() != tok:
            raise ParseError(f"expected {tok!r}, found {self.peek()!r}", self.pos())
        return self.advance()

    # expr := ['+'|'-'] term (('+'|'-') term)*
    def expr(self):
        sign = 1
        if self.peek() in ("+", "-"):
            if self.advance() == "-":
                sign = -1
        v = self.term()
        if sign < 0:
            v = _neg(v)
        while self.peek() in ("+", "-"):
            op = self.advance()
            v = _add(self.ctx, v, self.term(), 1 if op == "+" else -1)
        return v

    # term := factor (('*'|'/') factor)*
    def term(self):
        v = self.factor()
        while self.peek() in ("*", "/"):
            op = self.advance()
            rhs = self.factor()
            v = _mul(v, rhs) if op == "*" else _div(v, rhs)
        return v

    def factor(self):
        if self.peek() == "-":
            self.advance()
            return _neg(self.factor())
        return self.atom()

    def _exponent(self, v):
        if self.peek() in ("^", "**"):
            self.advance()
            e = self.peek()
            if e is None or not e.isdigit():
                raise ParseError("exponent must be a nonnegative integer", self.pos())
            self.advance()
            if v[0] != _S:
                raise ParseError("only scalars can be raised to a power")
            out = ONE
            for _ in range(int(e)):
                out = out * v[1]
            return (_S, out)
        return v

    def atom(self):
        t = self.peek()
        if t is None:
            raise ParseError("unexpected end of input", self.pos())
        if t == "(":
            self.advance()
            v = self.expr()
            self.expect(")")
            return self._exponent(v)
        if t.isdigit():
            self.advance()
            return self._exponent((_S, sc(int(t))))
        if t == ":":
            return (_F, self.wick_group())
        if t == "no":
            self.advance()
            self.expect("(")
            parts = [_to_field(self.ctx, self.expr())]
            while self.peek() == ",":
                self.advance()
                parts.append(_to_field(self.ctx, self.expr()))
            self.expect(")")
            out = parts[-1]
            for p in reversed(parts[:-1]):
                out = p.wick(out)
            return (_F, out)
        if t == "one":
            self.advance()
            return (_F, self.ctx.alg.one)
        if t in ("k", "K") and t not in self.ctx.names():
            self.advance()
            return self._exponent((_S, K))
        if t == "d" and self._derivative_ahead():
            return (_F, self.derivative_form())
        if t[0].isalpha():
            return (_F, self.letter())
        raise ParseError(f"unexpected token {t!r}", self.pos())

    def _derivative_ahead(self):
        nxt = self.tokens[self.i + 1][0]
        return nxt in ("(", "^") and "d" not in self.ctx.names()

    # d(expr) or d^m(expr); also d^m applied to a bare letter, which is
    # how the canonical printer writes derivative letters
    def derivative_form(self):
        self.expect("d")
        m = 1
        if self.peek() in ("^", "**"):
            self.advance()
            e = self.peek()
            if e is None or not e.isdigit():
                raise ParseError("derivative order must be a nonnegative integer", self.pos())
            self.advance()
            m = int(e)
        if self.peek() == "(":
            self.advance()
            out = _to_field(self.ctx, self.expr())
            self.expect(")")
        else:
            out = self.letter()
        for _ in range(m):
            out = out.derivative()
        return out

    # a single generator, possibly with a `d`/`d^m` prefix fused into the
    # identifier (the printer writes `dc[1]`, `d^2c[1]`, `ddX[1]`)
    def letter(self):
        t = self.peek()
        if t is None or not t[0].isalpha():
            raise ParseError(f"expected a generator, found {t!r}", self.pos())
        if t == "d" and self.tokens[self.i + 1][0] in ("^", "**") and "d" not in self.ctx.names():
            return self.derivative_form()
        self.advance()
        name, deriv = t, 0
        names = self.ctx.names()
        while name not in names and name.startswith("d") and len(name) > 1:
            name = name[1:]
            deriv += 1
        if name not in names:
            raise ParseError(f"unknown generator {t!r}", self.pos())
        indices = ()
        if self.peek() == "[":
            self.advance()
            indices = (self.index_item(),)
            while self.peek() == ",":
                self.advance()
                indices = indices + (self.index_item(),)
            self.expect("]")
        out = self.ctx.resolve(name, indices)
        for _ in range(deriv):
            out = out.derivative()
        return out

    def index_item(self):
        t = self.peek()
        if t in ("+", "-"):
            self.advance()
            if self.peek() is not None and self.peek().isdigit():
                v = int(self.advance())
                return -v if t == "-" else v
            return t
        if t is not None and t.isdigit():
            return int(self.advance())
        if t is not None and t[0].isalpha():
            return self.advance()
        raise ParseError(f"bad index {t!r}", self.pos())

    # :letter letter ...: builds the canonical normal form of the
    # right-nested Wick product of the letters
    def wick_group(self):
        self.expect(":")
        letters = []
        while self.peek() != ":":
            if self.peek() is None:
                raise ParseError("unterminated wick group", self.pos())
            letters.append(self.letter())
        self.expect(":")
        if not letters:
            return self.ctx.alg.one
        out = letters[-1]
        for p in reversed(letters[:-1]):
            out = p.wick(out)
        return out


def parse_field(text: str, ctx: Context) -> FieldExpr:
    """Parse an expression in the given algebra context to its canonical
    FieldExpr; raises ParseError with a position on bad input."""
    p = _Parser(text, ctx)
    v = p.expr()
    if p.peek() is not None:
        raise ParseError(f"trailing input {p.peek()!r}", p.pos())
    return _to_field(ctx, v)
