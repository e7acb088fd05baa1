"""Exact arithmetic in Q(k): ratios of integer-coefficient polynomials in the
formal level parameter k.

Values are immutable and stored in reduced form: gcd(num, den) = 1 over Z[k]
(including integer content), and the denominator has a positive leading
coefficient.  Structural equality therefore coincides with equality in the
field.  Polynomials are tuples of ints, low degree first, with no trailing
zeros (the zero polynomial is the empty tuple).
"""

from __future__ import annotations

import math
import re
from fractions import Fraction

Poly = tuple  # tuple of ints, low degree first


def _trim(cs):
    cs = list(cs)
    while cs and cs[-1] == 0:
        cs.pop()
    return tuple(cs)


def _padd(a, b):
    n = max(len(a), len(b))
    return _trim((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n))


def _pneg(a):
    return tuple(-c for c in a)


def _pmul(a, b):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim(out)


def _pscale(a, c):
    if c == 0:
        return ()
    return tuple(x * c for x in a)


def _content(a):
    return math.gcd(*a) if a else 0


def _pgcd(a, b):
    """gcd in Z[k], primitive with positive leading coefficient."""
    if not a:
        b = tuple(c // _content(b) for c in b) if b else ()
        return _pneg(b) if b and b[-1] < 0 else b
    if not b:
        a = tuple(c // _content(a) for c in a)
        return _pneg(a) if a[-1] < 0 else a
    # Euclid over Q, then re-primitivise.
    fa = [Fraction(c) for c in a]
    fb = [Fraction(c) for c in b]
    while fb:
        # fa mod fb
        ra = fa[:]
        while len(ra) >= len(fb) and any(ra):
            while ra and ra[-1] == 0:
                ra.pop()
            if len(ra) < len(fb):
                break
            q = ra[-1] / fb[-1]
            shift = len(ra) - len(fb)
            for i, c in enumerate(fb):
                ra[shift + i] -= q * c
            ra.pop()
        while ra and ra[-1] == 0:
            ra.pop()
        fa, fb = fb, ra
    lcm_den = 1
    for c in fa:
        lcm_den = lcm_den * c.denominator // math.gcd(lcm_den, c.denominator)
    g = _trim(int(c * lcm_den) for c in fa)
    g = tuple(c // _content(g) for c in g)
    return _pneg(g) if g and g[-1] < 0 else g


def _peval(a, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(a):
        acc = acc * x + c
    return acc


def _pstr(a) -> str:
    if not a:
        return "0"
    parts = []
    for i in range(len(a) - 1, -1, -1):
        c = a[i]
        if c == 0:
            continue
        if i == 0:
            term = str(abs(c))
        else:
            kpow = "k" if i == 1 else f"k^{i}"
            term = kpow if abs(c) == 1 else f"{abs(c)}*{kpow}"
        sign = "-" if c < 0 else ("+" if parts else "")
        parts.append(sign + term)
    return "".join(parts)


class Scalar:
    """An element of Q(k), reduced, immutable, hashable."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num, den=(1,), _reduced=False):
        num = num if isinstance(num, tuple) else _trim(num)
        den = den if isinstance(den, tuple) else _trim(den)
        if not den:
            raise ZeroDivisionError("zero denominator in Q(k)")
        if not _reduced:
            if not num:
                den = (1,)
            else:
                g = _pgcd(num, den)
                if g != (1,):
                    num = _pdiv_exact(num, g)
                    den = _pdiv_exact(den, g)
                c = math.gcd(_content(num), _content(den))
                if den[-1] < 0:
                    c = -c
                if c != 1:
                    num = tuple(x // c for x in num)
                    den = tuple(x // c for x in den)
        self.num = num
        self.den = den
        self._hash = None

    # -- constructors -------------------------------------------------
    @staticmethod
    def from_int(n: int) -> "Scalar":
        return Scalar((n,) if n else (), (1,), _reduced=True)

    @staticmethod
    def from_fraction(q) -> "Scalar":
        q = Fraction(q)
        if q == 0:
            return ZERO
        return Scalar((q.numerator,), (q.denominator,), _reduced=True)

    # -- predicates ---------------------------------------------------
    def is_zero(self) -> bool:
        return not self.num

    def __bool__(self):
        return bool(self.num)

    def is_constant(self) -> bool:
        return len(self.num) <= 1 and len(self.den) == 1

    def as_fraction(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"not a constant: {self}")
        return Fraction(self.num[0] if self.num else 0, self.den[0])

    # -- arithmetic ---------------------------------------------------
    def __add__(self, other):
        if not other.num:
            return self
        if not self.num:
            return other
        if len(self.den) == 1 and len(other.den) == 1:
            b, d = self.den[0], other.den[0]
            return Scalar(_padd(_pscale(self.num, d), _pscale(other.num, b)), (b * d,))
        return Scalar(
            _padd(_pmul(self.num, other.den), _pmul(other.num, self.den)),
            _pmul(self.den, other.den),
        )

    def __neg__(self):
        return Scalar(_pneg(self.num), self.den, _reduced=True)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not self.num or not other.num:
            return ZERO
        return Scalar(_pmul(self.num, other.num), _pmul(self.den, other.den))

    def __truediv__(self, other):
        if not other.num:
            raise ZeroDivisionError("division by zero in Q(k)")
        if not self.num:
            return ZERO
        return Scalar(_pmul(self.num, other.den), _pmul(self.den, other.num))

    def inverse(self) -> "Scalar":
        return ONE / self

    def __eq__(self, other):
        return isinstance(other, Scalar) and self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    # -- specialization -----------------------------------------------
    def evaluate_at(self, k0) -> Fraction:
        """Exact value at k = k0; raises PoleError if k0 is a pole."""
        k0 = Fraction(k0)
        d = _peval(self.den, k0)
        if d == 0:
            raise PoleError(f"pole at k = {k0}: denominator {_pstr(self.den)} vanishes")
        return _peval(self.num, k0) / d

    def limit_at_infinity(self) -> Fraction:
        """lim_{k -> oo}; raises DivergesError if deg num > deg den."""
        if not self.num:
            return Fraction(0)
        dn, dd = len(self.num) - 1, len(self.den) - 1
        if dn > dd:
            raise DivergesError(f"diverges as k -> oo: {self}")
        if dn < dd:
            return Fraction(0)
        return Fraction(self.num[-1], self.den[-1])

    # -- printing -----------------------------------------------------
    def __repr__(self):
        return f"Scalar({self})"

    def __str__(self):
        ns = _pstr(self.num)
        if self.den == (1,):
            return ns
        if len(self.num) > 1:
            ns = f"({ns})"
        ds = _pstr(self.den)
        if len(self.den) > 1:
            ds = f"({ds})"
        return f"{ns}/{ds}"


class PoleError(ZeroDivisionError):
    pass


class DivergesError(ArithmeticError):
    pass


def _pdiv_exact(a, b):
    """Exact division in Q[k], result known to be in Z[k]."""
    fa = [Fraction(c) for c in a]
    out = [Fraction(0)] * (len(a) - len(b) + 1)
    for i in range(len(out) - 1, -1, -1):
        q = fa[i + len(b) - 1] / b[-1]
        out[i] = q
        for j, c in enumerate(b):
            fa[i + j] -= q * c
    assert all(c == 0 for c in fa[: len(b) - 1])
    return _trim(int(c) for c in out)


ZERO = Scalar((), (1,), _reduced=True)
ONE = Scalar((1,), (1,), _reduced=True)
K = Scalar((0, 1), (1,), _reduced=True)


def sc(value, den=None) -> Scalar:
    """Convenience constructor: sc(3), sc(1, 2) = 1/2, sc(Fraction(5, 6))."""
    if den is not None:
        return Scalar.from_fraction(Fraction(value, den))
    if isinstance(value, Scalar):
        return value
    return Scalar.from_fraction(Fraction(value))


# ---------------------------------------------------------------------------
# Text syntax: integers, + - * / ^, parentheses, symbol `k`.
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(\d+|[kK]|\*\*|[-+*/^()])")


class ScalarSyntaxError(ValueError):
    pass


def parse_scalar(text: str) -> Scalar:
    """Parse an element of Q(k) from text, e.g. `(3-k^2)/k^2`."""
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip():
                raise ScalarSyntaxError(f"bad character at position {pos}: {text[pos:]!r}")
            break
        tokens.append(m.group(1))
        pos = m.end()
    tokens.append(None)  # sentinel
    idx = [0]

    def peek():
        return tokens[idx[0]]

    def advance():
        idx[0] += 1
        return tokens[idx[0] - 1]

    def atom() -> Scalar:
        t = peek()
        if t == "(":
            advance()
            v = expr()
            if peek() != ")":
                raise ScalarSyntaxError("expected )")
            advance()
        elif t in ("k", "K"):
            advance()
            v = K
        elif t is not None and t.isdigit():
            advance()
            v = Scalar.from_int(int(t))
        elif t == "-":
            advance()
            return -atom()
        else:
            raise ScalarSyntaxError(f"unexpected token {t!r}")
        if peek() in ("^", "**"):
            advance()
            e = peek()
            if e is None or not e.isdigit():
                raise ScalarSyntaxError("exponent must be a nonnegative integer")
            advance()
            out = ONE
            for _ in range(int(e)):
                out = out * v
            return out
        return v

    def term() -> Scalar:
        v = atom()
        while peek() in ("*", "/"):
            op = advance()
            rhs = atom()
            v = v * rhs if op == "*" else v / rhs
        return v

    def expr() -> Scalar:
        t = peek()
        neg = False
        if t in ("+", "-"):
            advance()
            neg = t == "-"
        v = term()
        if neg:
            v = -v
        while peek() in ("+", "-"):
            op = advance()
            rhs = term()
            v = v + rhs if op == "+" else v - rhs
        return v

    out = expr()
    if peek() is not None:
        raise ScalarSyntaxError(f"trailing input at token {peek()!r}")
    return out
