"""The OPE calculus engine.

An `Algebra` is a registry of generators with finitely supported pairwise
OPEs (scalar or linear pole coefficients).  `FieldExpr` values are finite
linear combinations of canonical normally ordered monomials in derivatives
of the generators, with coefficients in Q(k).  All circle products
a o_n b (n in Z) are computed recursively from the generator table using:

  * (da) o_n b = -n * (a o_{n-1} b)  and the Leibniz rule for d,
  * the noncommutative Wick formula for a o_n (:bc:)  (n >= 0),
  * the Borcherds iterate formula for (:ab:) o_n c  (any n),
  * skew-symmetry to derive reverse-orientation generator OPEs,
  * quasi-commutativity / quasi-associativity to canonically reorder
    Wick products.

A monomial is a tuple of letters (gen_index, deriv_order), kept in the
registry's canonical order: by generator index ascending, higher derivative
orders to the left within one generator.  Equal odd letters never repeat;
they are rewritten using the self-contraction correction (zero for free
odd generators).  Monomials denote right-nested iterated Wick products.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb, factorial

from .coeff import ONE, ZERO, Scalar, sc

Letter = tuple  # (gen_index, deriv_order)
Monomial = tuple  # tuple of Letters


class Generator:
    """A named strong generator with parity, weight and algebra tag."""

    __slots__ = ("name", "indices", "parity", "weight", "tag", "index")

    def __init__(self, name, indices=(), parity=0, weight=Fraction(1), tag=""):
        self.name = name
        self.indices = tuple(indices)
        self.parity = parity  # 0 even, 1 odd
        self.weight = Fraction(weight)
        self.tag = tag
        self.index = None  # assigned at registration

    @property
    def key(self):
        return (self.name,) + self.indices

    def __repr__(self):
        idx = "[" + ",".join(str(i) for i in self.indices) + "]" if self.indices else ""
        return f"{self.name}{idx}"


class EngineError(RuntimeError):
    """Internal consistency failure (e.g. pole-order bound violated)."""


class Algebra:
    """Frozen registry of generators plus their pairwise OPE table.

    `pair_opes` maps (key_a, key_b) -> {n: expr-spec} for one orientation of
    each pair; missing orientations are derived by skew-symmetry.  Instead of
    an explicit table, an `ope_fn(ga, gb) -> {n: FieldExpr}` may be supplied
    for lazily generated (infinite-family) algebras; it must cover both
    orientations itself.
    """

    def __init__(self, generators, pair_opes=None, ope_fn=None, tag=""):
        self.tag = tag
        self.gens = list(generators)
        self._by_key = {}
        for i, g in enumerate(self.gens):
            g.index = i
            if g.key in self._by_key:
                raise ValueError(f"duplicate generator {g!r}")
            self._by_key[g.key] = g
        self._ope_fn = ope_fn
        self._table = {}  # (gi, gj) -> {n: FieldExpr}
        self._nprod_cache = {}
        self._wick_cache = {}
        self.one = FieldExpr(self, {(): ONE})
        self.zero = FieldExpr(self, {})
        if pair_opes is not None:
            self._load_table(pair_opes)

    # -- construction helpers -----------------------------------------
    def gen(self, name, *indices) -> "FieldExpr":
        g = self._by_key[(name,) + tuple(indices)]
        return FieldExpr(self, {((g.index, 0),): ONE})

    def generator(self, name, *indices) -> Generator:
        return self._by_key[(name,) + tuple(indices)]

    def scalar_field(self, c) -> "FieldExpr":
        c = sc(c)
        return FieldExpr(self, {(): c} if c else {})

    def _load_table(self, pair_opes):
        supplied = {}
        for (ka, kb), poles in pair_opes.items():
            ga, gb = self._by_key[tuple(ka)], self._by_key[tuple(kb)]
            entry = {}
            for n, spec in poles.items():
                e = self._as_expr(spec)
                if e:
                    entry[n] = e
            supplied[(ga.index, gb.index)] = entry
        for (i, j), entry in supplied.items():
            self._table[(i, j)] = entry
        for (i, j), entry in list(supplied.items()):
            rev = self._skew_reverse(self.gens[i], self.gens[j], entry)
            if (j, i) in supplied:
                if supplied[(j, i)] != rev:
                    raise ValueError(
                        f"inconsistent OPE table for pair "
                        f"({self.gens[i]!r}, {self.gens[j]!r}): derived reverse "
                        f"conflicts with the supplied one"
                    )
            else:
                self._table[(j, i)] = rev
        # unmentioned pairs are regular
        for i in range(len(self.gens)):
            for j in range(len(self.gens)):
                self._table.setdefault((i, j), {})

    def _as_expr(self, spec) -> "FieldExpr":
        """spec: FieldExpr, or list of (coeff, [letter keys]) with a letter
        key being (name, *indices) or ((name, *indices), deriv)."""
        if isinstance(spec, FieldExpr):
            return spec
        terms = {}
        for coeff, letters in spec:
            seq = []
            for item in letters:
                if item and isinstance(item[0], tuple):
                    key, d = item
                else:
                    key, d = item, 0
                seq.append((self._by_key[tuple(key)].index, d))
            e = self.normal_form(seq)
            for m, c in e.terms.items():
                terms[m] = terms.get(m, ZERO) + sc(coeff) * c
        return FieldExpr(self, terms).trim()

    def _skew_reverse(self, ga, gb, entry):
        """Derive {n: gb o_n ga} from {n: ga o_n gb} by skew-symmetry."""
        if not entry:
            return {}
        nmax = max(entry)
        out = {}
        p = -ONE if ga.parity and gb.parity else ONE
        for n in range(nmax + 1):
            acc = self.zero
            for j in range(nmax - n + 1):
                e = entry.get(n + j)
                if e is None or not e:
                    continue
                d = e
                for _ in range(j):
                    d = d.derivative()
                s = sc(Fraction((-1) ** (n + j + 1), factorial(j)))
                acc = acc + d.scale(s)
            acc = acc.scale(p)
            if acc:
                out[n] = acc
        return out

    def _pair_table(self, gi, gj):
        ent = self._table.get((gi, gj))
        if ent is None:
            if self._ope_fn is None:
                raise KeyError(f"no OPE registered for pair ({self.gens[gi]!r}, {self.gens[gj]!r})")
            ent = {n: e for n, e in self._ope_fn(self.gens[gi], self.gens[gj]).items() if e}
            self._table[(gi, gj)] = ent
        return ent

    # -- weights / parities -------------------------------------------
    def letter_weight(self, letter) -> Fraction:
        return self.gens[letter[0]].weight + letter[1]

    def mono_weight(self, mono) -> Fraction:
        return sum((self.letter_weight(l) for l in mono), Fraction(0))

    def mono_parity(self, mono) -> int:
        return sum(self.gens[l[0]].parity for l in mono) & 1

    @staticmethod
    def letter_key(letter):
        return (letter[0], -letter[1])

    # -- the engine ----------------------------------------------------
    def nprod_mono(self, ma: Monomial, mb: Monomial, n: int) -> "FieldExpr":
        key = (ma, mb, n)
        hit = self._nprod_cache.get(key)
        if hit is not None:
            return hit
        res = self._nprod_mono(ma, mb, n)
        self._nprod_cache[key] = res
        return res

    def _nprod_mono(self, ma, mb, n):
        if not ma:  # 1 o_n b = delta_{n,-1} b
            return FieldExpr(self, {mb: ONE}) if n == -1 else self.zero
        if n < -1:
            m = -n - 1
            da = FieldExpr(self, {ma: ONE})
            for _ in range(m):
                da = da.derivative()
            return self.wick(da, FieldExpr(self, {mb: ONE})).scale(sc(Fraction(1, factorial(m))))
        if n == -1:
            if len(ma) == 1:
                return self.wick_letter(ma[0], mb)
            return self._iterate(ma, mb, -1)
        # n >= 0
        if not mb:
            return self.zero
        if len(ma) == 1:
            g, d = ma[0]
            if d > 0:
                return self.nprod_mono(((g, d - 1),), mb, n - 1).scale(sc(-n))
            if len(mb) == 1:
                h, e = mb[0]
                if e > 0:
                    base = self.nprod_mono(ma, ((h, e - 1),), n).derivative()
                    if n > 0:
                        base = base + self.nprod_mono(ma, ((h, e - 1),), n - 1).scale(sc(n))
                    return base
                return self._pair_table(g, h).get(n, self.zero)
            # noncommutative Wick formula: a o_n (:b1 C:)
            b1, C = mb[0], mb[1:]
            Cx = FieldExpr(self, {C: ONE})
            out = self.wick(self.nprod_mono(ma, (b1,), n), Cx)
            sign = -ONE if self.gens[g].parity and self.gens[b1[0]].parity else ONE
            inner = self.nprod_expr(FieldExpr(self, {ma: ONE}), Cx, n)
            out = out + self.wick_letter_expr(b1, inner).scale(sign)
            for j in range(n):
                left = self.nprod_mono(ma, (b1,), n - 1 - j)
                if left:
                    out = out + self.nprod_expr(left, Cx, j).scale(sc(comb(n, j + 1)))
            return out
        return self._iterate(ma, mb, n)

    def _iterate(self, ma, mb, n):
        """(:x Y:) o_n c via the Borcherds iterate formula."""
        x, Y = ma[0], ma[1:]
        Yx = FieldExpr(self, {Y: ONE})
        cx = FieldExpr(self, {mb: ONE})
        bound_Yc = int(self.mono_weight(Y) + self.mono_weight(mb)) + 1
        bound_xc = int(self.letter_weight(x) + self.mono_weight(mb)) + 1
        out = self.zero
        # only called with n >= -1, so n + i >= -1 throughout; the n + i = -1
        # term (i = 0 of the n = -1 case) is the plain nested Wick term and
        # recurses on the shorter right factor Y
        for i in range(bound_Yc - n + 2):
            inner = self.nprod_expr(Yx, cx, n + i)
            if not inner:
                continue
            dx = FieldExpr(self, {((x[0], x[1] + i),): ONE})
            out = out + self.wick(dx, inner).scale(sc(Fraction(1, factorial(i))))
        py = -ONE if self.gens[x[0]].parity and self.mono_parity(Y) else ONE
        for i in range(bound_xc + 1):
            inner = self.nprod_mono((x,), mb, i)
            if not inner:
                continue
            out = out + self.nprod_expr(Yx, inner, n - 1 - i).scale(py)
        return out

    def nprod_expr(self, a: "FieldExpr", b: "FieldExpr", n: int) -> "FieldExpr":
        terms = {}
        for ma, ca in a.terms.items():
            for mb, cb in b.terms.items():
                part = self.nprod_mono(ma, mb, n)
                if not part:
                    continue
                c = ca * cb
                for m, pc in part.terms.items():
                    terms[m] = terms.get(m, ZERO) + c * pc
        return FieldExpr(self, terms).trim()

    def wick(self, a: "FieldExpr", b: "FieldExpr") -> "FieldExpr":
        return self.nprod_expr(a, b, -1)

    def wick_letter_expr(self, letter, e: "FieldExpr") -> "FieldExpr":
        terms = {}
        for m, c in e.terms.items():
            part = self.wick_letter(letter, m)
            for mm, pc in part.terms.items():
                terms[mm] = terms.get(mm, ZERO) + c * pc
        return FieldExpr(self, terms).trim()

    def wick_letter(self, letter, mono) -> "FieldExpr":
        """Canonical form of :letter mono: for a single letter."""
        key = (letter, mono)
        hit = self._wick_cache.get(key)
        if hit is not None:
            return hit
        res = self._wick_letter(letter, mono)
        self._wick_cache[key] = res
        return res

    def _wick_letter(self, a, mono):
        if not mono:
            return FieldExpr(self, {(a,): ONE})
        b = mono[0]
        ka, kb = self.letter_key(a), self.letter_key(b)
        if ka < kb:
            return FieldExpr(self, {(a,) + mono: ONE})
        C = mono[1:]
        Cx = FieldExpr(self, {C: ONE})
        if ka == kb:
            if not self.gens[a[0]].parity:
                return FieldExpr(self, {(a,) + mono: ONE})
            # equal odd letters: :a(aC): = 1/2 :Q(a,a) C: - A(a,a,C)
            q = self._qcomm(a, a)
            return self.wick(q, Cx).scale(sc(Fraction(1, 2))) - self._assoc_corr(a, a, C)
        # out of order: commute a past b
        pa, pb = self.gens[a[0]].parity, self.gens[b[0]].parity
        eps = -ONE if pa and pb else ONE
        main = self.wick_letter_expr(b, self.wick_letter(a, C)).scale(eps)
        corr = (
            self._assoc_corr(b, a, C).scale(eps)
            + self.wick(self._qcomm(a, b), Cx)
            - self._assoc_corr(a, b, C)
        )
        return main + corr

    def _qcomm(self, x, y) -> "FieldExpr":
        """Q(x,y) = sum_i (-1)^i/(i+1)! d^{i+1}(x o_i y)  (letters x, y)."""
        bound = int(self.letter_weight(x) + self.letter_weight(y)) + 1
        out = self.zero
        for i in range(bound + 1):
            e = self.nprod_mono((x,), (y,), i)
            if not e:
                continue
            d = e
            for _ in range(i + 1):
                d = d.derivative()
            out = out + d.scale(sc(Fraction((-1) ** i, factorial(i + 1))))
        return out

    def _assoc_corr(self, x, y, C: Monomial) -> "FieldExpr":
        """A(x,y,C) = sum_i 1/(i+1)! [ :(d^{i+1}x)(y o_i C): + p :(d^{i+1}y)(x o_i C): ]."""
        Cx = FieldExpr(self, {C: ONE})
        p = -ONE if self.gens[x[0]].parity and self.gens[y[0]].parity else ONE
        wC = self.mono_weight(C)
        out = self.zero
        for i in range(int(self.letter_weight(y) + wC) + int(self.letter_weight(x) + wC) + 2):
            coeff = sc(Fraction(1, factorial(i + 1)))
            t1 = self.nprod_mono((y,), C, i)
            if t1:
                dx = FieldExpr(self, {((x[0], x[1] + i + 1),): ONE})
                out = out + self.wick(dx, t1).scale(coeff)
            t2 = self.nprod_mono((x,), C, i)
            if t2:
                dy = FieldExpr(self, {((y[0], y[1] + i + 1),): ONE})
                out = out + self.wick(dy, t2).scale(coeff * p)
            if not t1 and not t2 and i > int(self.letter_weight(x) + self.letter_weight(y) + wC):
                break
        return out

    # -- public constructors ------------------------------------------
    def normal_form(self, letters) -> "FieldExpr":
        """Canonical FieldExpr for the right-nested Wick product of a
        letter sequence, given in any order."""
        out = self.one
        for letter in reversed(list(letters)):
            out = self.wick_letter_expr(tuple(letter), out)
        return out

    def weight_basis(self, w, gens=None) -> list:
        """Canonical PBW monomial basis of the weight-w subspace, optionally
        restricted to a subset of generators."""
        w = Fraction(w)
        if w < 0:
            raise ValueError("negative weight")
        allowed = list(gens) if gens is not None else list(range(len(self.gens)))
        letters = []
        for gi in allowed:
            base = self.gens[gi].weight
            d = 0
            while base + d <= w:
                letters.append((gi, d))
                d += 1
        letters.sort(key=self.letter_key)
        out = []

        def rec(start, remaining, acc):
            if remaining == 0:
                out.append(tuple(acc))
                return
            for idx in range(start, len(letters)):
                l = letters[idx]
                lw = self.letter_weight(l)
                if lw > remaining or lw == 0:
                    continue
                repeat = acc and acc[-1] == l
                if repeat and self.gens[l[0]].parity:
                    continue
                acc.append(l)
                rec(idx, remaining - lw, acc)
                acc.pop()

        rec(0, w, [])
        out.sort()
        return [FieldExpr(self, {m: ONE}) for m in out]


def coordinates(exprs):
    """Coordinate rows of a list of FieldExpr over their joint monomial set."""
    monos = sorted({m for e in exprs for m in e.terms})
    rows = [[e.terms.get(m, ZERO) for m in monos] for e in exprs]
    return monos, rows


class FieldExpr:
    """A finite linear combination of canonical normally ordered monomials."""

    __slots__ = ("algebra", "terms", "_hash")

    def __init__(self, algebra: Algebra, terms: dict):
        self.algebra = algebra
        self.terms = terms
        self._hash = None

    def trim(self) -> "FieldExpr":
        dead = [m for m, c in self.terms.items() if not c]
        for m in dead:
            del self.terms[m]
        return self

    # -- ring-ish operations ------------------------------------------
    def __add__(self, other):
        self._check(other)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            nc = terms.get(m, ZERO) + c
            if nc:
                terms[m] = nc
            elif m in terms:
                del terms[m]
        return FieldExpr(self.algebra, terms)

    def __sub__(self, other):
        return self + other.scale(sc(-1))

    def __neg__(self):
        return self.scale(sc(-1))

    def scale(self, c) -> "FieldExpr":
        c = sc(c)
        if not c:
            return self.algebra.zero
        return FieldExpr(self.algebra, {m: cc * c for m, cc in self.terms.items()})

    def derivative(self) -> "FieldExpr":
        alg = self.algebra
        out = alg.zero
        for mono, c in self.terms.items():
            for i, (g, d) in enumerate(mono):
                bumped = mono[:i] + ((g, d + 1),) + mono[i + 1 :]
                out = out + alg.normal_form(bumped).scale(c)
        return out

    def nprod(self, other, n: int) -> "FieldExpr":
        self._check(other)
        return self.algebra.nprod_expr(self, other, n)

    def wick(self, other) -> "FieldExpr":
        return self.nprod(other, -1)

    def ope(self, other) -> dict:
        """Singular part: {pole_order (>=1): coefficient of (z-w)^{-pole}}.

        Guards the pole-order bound wt(a)+wt(b) for homogeneous inputs."""
        self._check(other)
        try:
            bound = self.weight() + other.weight()
        except ValueError:
            bound = None
        out = {}
        n = 0
        limit = int(bound) + 2 if bound is not None else 64
        while n <= limit:
            e = self.nprod(other, n)
            if e:
                if bound is not None and n + 1 > bound:
                    raise EngineError(
                        f"pole order {n + 1} exceeds weight bound {bound}: "
                        f"internal rewriting inconsistency"
                    )
                out[n + 1] = e
            n += 1
        return out

    # -- structure -----------------------------------------------------
    def weight(self) -> Fraction:
        """Common weight of all terms; raises on inhomogeneous input."""
        ws = {self.algebra.mono_weight(m) for m in self.terms}
        if not ws:
            return Fraction(0)
        if len(ws) > 1:
            raise ValueError(f"inhomogeneous expression, weights {sorted(ws)}")
        return ws.pop()

    def parity(self) -> int:
        ps = {self.algebra.mono_parity(m) for m in self.terms}
        if not ps:
            return 0
        if len(ps) > 1:
            raise ValueError("mixed parity expression")
        return ps.pop()

    def identity_part(self) -> Scalar:
        return self.terms.get((), ZERO)

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        return (
            isinstance(other, FieldExpr)
            and self.algebra is other.algebra
            and self.terms == other.terms
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def _check(self, other):
        if not isinstance(other, FieldExpr) or other.algebra is not self.algebra:
            raise ValueError("operands belong to different registered algebras")

    # -- printing -------------------------------------------------------
    def _mono_str(self, mono):
        if not mono:
            return "1"
        parts = []
        for g, d in mono:
            s = repr(self.algebra.gens[g])
            if d == 1:
                s = f"d{s}"
            elif d > 1:
                s = f"d^{d}{s}"
            parts.append(s)
        if len(parts) == 1 and mono[0][1] == 0:
            return parts[0]
        return ":" + " ".join(parts) + ":"

    def __str__(self):
        if not self.terms:
            return "0"
        bits = []
        for mono in sorted(self.terms, key=lambda m: (self.algebra.mono_weight(m), m)):
            c = self.terms[mono]
            cs = str(c)
            ms = self._mono_str(mono)
            if ms == "1":
                term = cs
            elif cs == "1":
                term = ms
            elif cs == "-1":
                term = f"-{ms}"
            else:
                if "+" in cs[1:] or "-" in cs[1:]:
                    cs = f"({cs})"
                term = f"{cs}*{ms}"
            if bits and not term.startswith("-"):
                bits.append("+" + term)
            else:
                bits.append(term)
        return " ".join(bits)

    def __repr__(self):
        return f"<{self}>"
