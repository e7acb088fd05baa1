"""Heisenberg currents with a prescribed pairing, exponential vertex
operators, screening charges for a purely odd simple root system, and the
resulting one-parameter W-algebra with its complete n=2 OPE table.

The base algebra M is free (rank-n X/Y Heisenberg pairs plus n bc pairs),
so its canonical monomials coincide with classical Wick-ordered words.
Screening charges Res(:p e^{lambda.phi}:) act through the classical Wick
expansion; the exponential factor is carried implicitly and the result is
reported as a polynomial in M letters (zero iff the argument is in the
kernel)."""

from __future__ import annotations

from fractions import Fraction
from math import factorial

from .coeff import K, ONE, ZERO, sc
from .fields import Algebra, FieldExpr, Generator
from .linalg import rank, solve
from .report import Report


# ---------------------------------------------------------------------
# the base algebra M


def build_M(n, k=K) -> Algebra:
    """Rank-n algebra of dX_i, dY_i, b^i, c^i with dY_i(z)dX_j(w) ~
    delta_ij (z-w)^{-2} and b^i(z)c^j(w) ~ delta_ij (z-w)^{-1}."""
    if n < 1:
        raise ValueError("rank must be positive")
    gens, opes = [], {}
    for i in range(1, n + 1):
        gens.append(Generator("dX", (i,), parity=0, weight=Fraction(1)))
        gens.append(Generator("dY", (i,), parity=0, weight=Fraction(1)))
        gens.append(Generator("b", (i,), parity=1, weight=Fraction(1, 2)))
        gens.append(Generator("c", (i,), parity=1, weight=Fraction(1, 2)))
        opes[(("dY", i), ("dX", i))] = {1: [(1, [])]}
        opes[(("b", i), ("c", i))] = {0: [(1, [])]}
    alg = Algebra(gens, opes, tag=f"M:{n}")
    alg.rank = n
    alg.level = sc(k)
    return alg


def _phi_dim(alg, letter):
    """The Heisenberg direction of a dX/dY letter, or None for bc letters."""
    g = alg.gens[letter[0]]
    if g.name == "dX":
        return ("X", g.indices[0])
    if g.name == "dY":
        return ("Y", g.indices[0])
    return None


def _pair_momentum(momentum, dim):
    """lambda.G.e_dim for the X/Y pairing G(Y_i, X_j) = delta_ij."""
    kind, i = dim
    other = ("Y", i) if kind == "X" else ("X", i)
    return momentum.get(other, ZERO)


def _canon(alg, letters):
    """Sort letters into engine canonical order; (Koszul sign, tuple) with
    sign 0 for a repeated odd letter."""
    seq = list(letters)
    sign = 1
    for i in range(1, len(seq)):
        j = i
        while j > 0 and Algebra.letter_key(seq[j - 1]) > Algebra.letter_key(seq[j]):
            if alg.gens[seq[j - 1][0]].parity and alg.gens[seq[j][0]].parity:
                sign = -sign
            seq[j - 1], seq[j] = seq[j], seq[j - 1]
            j -= 1
    for a, b in zip(seq, seq[1:]):
        if a == b and alg.gens[a[0]].parity:
            return 0, None
    return sign, tuple(seq)


def _poly_add_term(out, mono, coeff):
    nc = out.get(mono, ZERO) + coeff
    if nc:
        out[mono] = nc
    elif mono in out:
        del out[mono]


def _poly_mul(alg, p, q):
    out = {}
    for m1, c1 in p.items():
        for m2, c2 in q.items():
            s, m = _canon(alg, m1 + m2)
            if s:
                _poly_add_term(out, m, c1 * c2 * sc(s))
    return out


class ScreeningCharge:
    """Res(:p e^{lambda.phi}:) with p a linear combination of single M
    letters and lambda a momentum over the X/Y directions.

    apply() returns the residue as {word: coeff} with an implicit
    e^{lambda.phi} factor on every word; empty dict means the argument is
    in the kernel."""

    def __init__(self, alg, prefactor: FieldExpr, momentum: dict, name=""):
        self.alg = alg
        self.name = name
        self.momentum = {d: sc(v) for d, v in momentum.items() if sc(v)}
        self.prefactor = []
        for mono, c in prefactor.terms.items():
            if len(mono) != 1:
                raise ValueError("screening prefactor must be a sum of single letters")
            self.prefactor.append((c, mono[0]))

    def _mod_deriv(self, poly):
        """Derivative of :v e^{lambda.phi}: represented on the v part:
        Leibniz on the letters plus multiplication by lambda.dphi."""
        alg = self.alg
        out = {}
        for mono, c in poly.items():
            for i, (g, d) in enumerate(mono):
                s, m = _canon(alg, mono[:i] + ((g, d + 1),) + mono[i + 1 :])
                if s:
                    _poly_add_term(out, m, c * sc(s))
            for dim, lam in self.momentum.items():
                name = "dX" if dim[0] == "X" else "dY"
                letter = (alg.generator(name, dim[1]).index, 0)
                s, m = _canon(alg, mono + (letter,))
                if s:
                    _poly_add_term(out, m, c * lam * sc(s))
        return out

    def apply(self, a: FieldExpr) -> dict:
        alg = self.alg
        out = {}
        for pc, pi in self.prefactor:
            pg = alg.gens[pi[0]]
            partner = {"b": "c", "c": "b"}[pg.name]
            partner_idx = alg.generator(partner, pg.indices[0]).index
            for mono, mc in a.terms.items():
                self._expand(out, pc * mc, pi, partner_idx, mono)
        return out

    def _expand(self, out, base, pi, partner_idx, mono):
        """Sum over Wick contraction patterns of :pi e:(z) against mono(w)."""
        alg = self.alg
        r = len(mono)

        def rec(pos, pi_used, pole, value, kept, odd_seen):
            if pos == r:
                if pole == 0:
                    return
                t = pole - 1
                zstate = {(() if pi_used else (pi,)): ONE}
                for _ in range(t):
                    zstate = self._mod_deriv(zstate)
                tail = {tuple(kept): ONE}
                prod = _poly_mul(alg, zstate, tail)
                c = base * value / sc(factorial(t))
                for m, q in prod.items():
                    _poly_add_term(out, m, q * c)
                return
            letter = mono[pos]
            g, d = letter
            godd = alg.gens[g].parity
            # the letter stays uncontracted
            kept.append(letter)
            rec(pos + 1, pi_used, pole, value, kept, odd_seen + godd)
            kept.pop()
            # contraction with the exponential: phi letters only
            dim = _phi_dim(alg, letter)
            if dim is not None:
                lam = _pair_momentum(self.momentum, dim)
                if lam:
                    v = value * (-lam) * sc(factorial(d))
                    rec(pos + 1, pi_used, pole + d + 1, v, kept, odd_seen)
            # contraction with the prefactor letter
            if not pi_used and g == partner_idx:
                s = pi[1]
                v = value * sc(Fraction((-1) ** s * factorial(s + d)))
                if odd_seen & 1:
                    v = -v
                rec(pos + 1, True, pole + s + d + 1, v, kept, odd_seen)

        rec(0, False, 0, ONE, [], 0)

    def kills(self, a: FieldExpr) -> bool:
        return not self.apply(a)


def q_alpha(alg, i) -> ScreeningCharge:
    """Res(:b^i e^{Y_i}:)."""
    return ScreeningCharge(alg, alg.gen("b", i), {("Y", i): ONE}, name=f"Qa{i}")


def q_beta(alg, i) -> ScreeningCharge:
    """Res(:(c^i - c^{i+1}) e^{k(X_i - X_{i+1})}:); the 1/k normalization
    is dropped since kernel membership does not depend on it."""
    k = alg.level
    return ScreeningCharge(
        alg,
        alg.gen("c", i) - alg.gen("c", i + 1),
        {("X", i): k, ("X", i + 1): -k},
        name=f"Qb{i}",
    )


# ---------------------------------------------------------------------
# exponential-versus-exponential products (rank-1 bosonization checks)


def exp_pair_nprod(G, lam, mu, n):
    """e^{lam.phi} o_n e^{mu.phi} for a diagonal-free symmetric pairing G
    (dict over dim pairs).  Result: {letters: coeff} where a letter
    (dim, d) stands for d^{d+1} phi_dim, with an implicit e^{(lam+mu).phi}.
    Raises ValueError unless lam.G.mu is an integer."""

    def pair(v, w):
        acc = ZERO
        for dv, cv in v.items():
            for dw, cw in w.items():
                g = G.get((dv, dw), G.get((dw, dv)))
                if g is not None:
                    acc = acc + cv * cw * sc(g)
        return acc

    q = pair(lam, mu)
    if q.den != (1,) or len(q.num) > 1:
        raise ValueError(f"non-integer exponent pairing {q}")
    qint = q.num[0] if q.num else 0
    t = -n - 1 - qint
    if t < 0:
        return {}
    poly = {(): ONE}
    for _ in range(t):
        nxt = {}
        for mono, c in poly.items():
            for i, (dim, d) in enumerate(mono):
                m = tuple(sorted(mono[:i] + ((dim, d + 1),) + mono[i + 1 :]))
                _poly_add_term(nxt, m, c)
            for dim, cl in lam.items():
                m = tuple(sorted(mono + ((dim, 0),)))
                _poly_add_term(nxt, m, c * cl)
        poly = nxt
    return {m: c / sc(factorial(t)) for m, c in poly.items()}


def bosonization_check(report=None) -> Report:
    """Rank-1 sanity of the exponential calculus: e^{-phi} e^{phi} has
    residue 1 and collision value -dphi, e^{phi} e^{phi} is regular, and
    exponential weights are lam^2/2."""
    r = report or Report("bosonization")
    G = {(("p", 1), ("p", 1)): 1}
    minus = {("p", 1): -ONE}
    plus = {("p", 1): ONE}
    res = exp_pair_nprod(G, minus, plus, 0)
    r.add("exp.residue", res == {(): ONE}, f"got {res}")
    col = exp_pair_nprod(G, minus, plus, -1)
    r.add("exp.collision", col == {((("p", 1), 0),): -ONE}, f"got {col}")
    reg = all(not exp_pair_nprod(G, plus, plus, n) for n in range(0, 4))
    r.add("exp.like.regular", reg, "expected regular product")
    wt = ONE / sc(2)
    r.add("exp.weight", wt == sc(Fraction(1, 2)), "")
    try:
        exp_pair_nprod(G, {("p", 1): sc(Fraction(1, 2))}, plus, 0)
        r.add("exp.integer.guard", False, "non-integer pairing accepted")
    except ValueError:
        r.add("exp.integer.guard", True, "")
    return r


# ---------------------------------------------------------------------
# the W-algebra generators


def n_field(alg, i):
    """N_i = dX_i - :b^i c^i:."""
    bi = alg.generator("b", i).index
    ci = alg.generator("c", i).index
    return alg.gen("dX", i) - alg.normal_form([(bi, 0), (ci, 0)])


def e_field(alg, i):
    """E_i = dY_i."""
    return alg.gen("dY", i)


def psi_plus(alg, i):
    """Psi^+_i = b^i."""
    return alg.gen("b", i)


def psi_minus(alg, i):
    """Psi^-_i = dc^i - :c^i dY_i:."""
    ci = alg.generator("c", i).index
    yi = alg.generator("dY", i).index
    return alg.gen("c", i).derivative() - alg.normal_form([(ci, 0), (yi, 0)])


def build_W_generators(alg) -> dict:
    """The six fields E, N, Psi+-, F+- (rank n, level k)."""
    n, k = alg.rank, alg.level
    inv_k = ONE / k
    E = alg.zero
    N = alg.zero
    Pp = alg.zero
    Pm = alg.zero
    Fp = alg.zero
    Fm = alg.zero
    for i in range(1, n + 1):
        Ei, Ni = e_field(alg, i), n_field(alg, i)
        ppi, pmi = psi_plus(alg, i), psi_minus(alg, i)
        E = E - Ei
        N = N - Ni + Ei.scale(inv_k * sc(n - i))
        Pp = Pp + ppi
        Pm = Pm + pmi
        Fp = Fp + ppi.wick(Ni) - ppi.derivative().scale(inv_k * sc(n - i))
        Fm = Fm + Ni.wick(pmi) - pmi.derivative().scale(inv_k * sc(n - i))
    # cross coefficient 1/k, as required for beta-screening kernel
    # membership (the factor that actually survives the kernel check)
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i == j:
                continue
            term = e_field(alg, j).wick(psi_minus(alg, i)).scale(inv_k)
            Fm = Fm + (term if i < j else -term)
    return {"E": E, "N": N, "Psi+": Pp, "Psi-": Pm, "F+": Fp, "F-": Fm}


def verify_q1(n, report=None) -> Report:
    """Per-color gl(1|1) OPE tables and alpha-screening kernels."""
    alg = build_M(n)
    r = report or Report("q1")
    one = alg.one
    for i in range(1, n + 1):
        Ni, Ei = n_field(alg, i), e_field(alg, i)
        pp, pm = psi_plus(alg, i), psi_minus(alg, i)
        r.add(f"N{i}.E{i}", Ni.ope(Ei) == {2: one}, "")
        r.add(f"N{i}.N{i}", Ni.ope(Ni) == {2: one}, "")
        r.add(f"N{i}.Psi+{i}", Ni.ope(pp) == {1: -pp}, "")
        r.add(f"N{i}.Psi-{i}", Ni.ope(pm) == {1: pm}, "")
        # second-order pole +1 is forced by b(z)c(w) ~ +(z-w)^{-1}
        r.add(f"Psi+{i}.Psi-{i}", pp.ope(pm) == {2: one, 1: -Ei}, "")
        r.add(f"E{i}.E{i}", Ei.ope(Ei) == {}, "")
        r.add(f"E{i}.Psi-{i}", Ei.ope(pm) == {}, "")
        Q = q_alpha(alg, i)
        for label, f in (("N", Ni), ("E", Ei), ("Psi+", pp), ("Psi-", pm)):
            res = Q.apply(f)
            r.add(f"Qa{i}.kills.{label}{i}", not res, f"residue {res}")
    if n >= 2:
        cross = (
            n_field(alg, 1).ope(e_field(alg, 2)) == {}
            and psi_plus(alg, 1).ope(psi_minus(alg, 2)) == {}
        )
        r.add("cross.color.regular", cross, "")
    return r


def verify_q2(n, report=None) -> Report:
    """The beta-screening kernel memberships, symbolic k."""
    alg = build_M(n)
    k = alg.level
    r = report or Report("q2")
    for i in range(1, n):
        Q = q_beta(alg, i)
        Ni, Nj = n_field(alg, i), n_field(alg, i + 1)
        Ei, Ej = e_field(alg, i), e_field(alg, i + 1)
        pp, ppj = psi_plus(alg, i), psi_plus(alg, i + 1)
        pm, pmj = psi_minus(alg, i), psi_minus(alg, i + 1)
        combos = {
            "E.sum": Ei + Ej,
            "N.sum": Ni + Nj - Ei.scale(ONE / k),
            "Psi+.sum": pp + ppj,
            "Psi-.sum": pm + pmj,
            "Psi+N": pp.wick(Ni) + ppj.wick(Nj) - pp.derivative().scale(ONE / k),
            "NPsi-": Ni.wick(pm)
            + Nj.wick(pmj)
            + (Ej.wick(pm) - Ei.wick(pmj)).scale(ONE / k)
            - pm.derivative().scale(ONE / k),
        }
        for label, f in combos.items():
            res = Q.apply(f)
            r.add(f"Qb{i}.kills.{label}", not res, f"residue has {len(res)} terms")
    return r


def verify_kernel_theorem(n, report=None) -> Report:
    """All six W generators lie in every screening kernel; plus a mutation
    control dropping the derivative correction from F+."""
    alg = build_M(n)
    r = report or Report("kernels")
    fields = build_W_generators(alg)
    charges = [q_alpha(alg, i) for i in range(1, n + 1)]
    charges += [q_beta(alg, i) for i in range(1, n)]
    for Q in charges:
        for label, f in fields.items():
            res = Q.apply(f)
            r.add(f"{Q.name}.kills.{label}", not res, f"residue has {len(res)} terms")
    if n >= 2:
        bad = alg.zero
        for i in range(1, n + 1):
            bad = bad + psi_plus(alg, i).wick(n_field(alg, i))
        res = q_beta(alg, 1).apply(bad)
        r.add("mutation.F+.detected", bool(res), "mutated F+ not detected")
    return r


# ---------------------------------------------------------------------
# the n=2 OPE table


def build_W2_basis(alg=None) -> dict:
    """The eight strong generators of the rank-2 algebra.

    The current N is shifted by (1/2k - 1/2)E relative to the generator
    set of build_W_generators; this is the unique shift for which the
    dimension-two fields below have regular second-order poles with N and
    for which Psi-+ o1 G+- reproduces N itself.  With it the four currents
    close on gl(1|1) with all central terms doubled and <N,N> = 0.

    G+- = +-F+- + (1/2k - 1/2) dPsi+-: each is the unique field in the
    joint screening kernel at its weight that is T-primary of weight two,
    carries N-charge +-1, and pairs with E and Psi-+ as in the table
    checks; uniqueness was established by exact linear algebra over the
    kernel subspace.  H is the even weight-two partner of T; it equals
    (G+ o1 G- + dE/4)/2."""
    if alg is None:
        alg = build_M(2)
    if alg.rank != 2:
        raise ValueError("rank must be 2")
    k = alg.level
    f = build_W_generators(alg)
    shift = ONE / (k * sc(2)) - sc(Fraction(1, 2))
    f["N"] = f["N"] + f["E"].scale(shift)
    f["G+"] = f["F+"] + f["Psi+"].derivative().scale(shift)
    f["G-"] = -f["F-"] - f["Psi-"].derivative().scale(shift)
    E1, E2 = e_field(alg, 1), e_field(alg, 2)
    N1, N2 = n_field(alg, 1), n_field(alg, 2)
    p1, p2 = psi_plus(alg, 1), psi_plus(alg, 2)
    m1, m2 = psi_minus(alg, 1), psi_minus(alg, 2)
    T = (
        E1.wick(N1)
        + E2.wick(N2)
        - p1.wick(m1)
        - p2.wick(m2)
        - E1.derivative().scale((ONE + k) / (k * sc(2)))
        + E2.derivative().scale((ONE - k) / (k * sc(2)))
    )
    half = sc(Fraction(1, 2))
    H = (
        N1.wick(N1) + N2.wick(N2) - E1.wick(N1) - E2.wick(N2)
        + p1.wick(m1) + p2.wick(m2)
    ).scale(-half)
    H = H + (
        E1.wick(N2)
        - E2.wick(N1)
        + p1.wick(m2)
        - p2.wick(m1)
        + E1.wick(E2).scale(ONE / k)
        + N1.derivative()
        - N2.derivative()
    ).scale(ONE / (k * sc(2)))
    k2 = k * k
    H = H - (
        E1.derivative().scale(sc(2) * k2 + sc(2) * k + ONE)
        + E2.derivative().scale(sc(2) * k2 - sc(2) * k + ONE)
    ).scale(ONE / (k2 * sc(8)))
    f["T"] = T
    f["H"] = H
    return f


def w2_composites(f, k, r=ONE) -> dict:
    """The auxiliary normally ordered fields X0, X+, X-, X2 appearing in
    the dimension-two OPEs, built from the eight generators.

    r is the square of the rescaling applied to the odd generators (r=1
    normally); products of two odd generators are divided by r so the
    composites stay at their true normalization."""
    E, N, T, H = f["E"], f["N"], f["T"], f["H"]
    Pp, Pm, Gp, Gm = f["Psi+"], f["Psi-"], f["G+"], f["G-"]
    inv_r = ONE / sc(r)
    k2 = k * k
    half = sc(Fraction(1, 2))
    dPm, dPp = Pm.derivative(), Pp.derivative()
    X0 = (
        H.wick(E).scale(sc(2))
        - T.wick(E).scale(sc(2))
        - T.wick(N).scale(sc(2))
        - Gp.wick(Pm).scale(sc(2) * inv_r)
        - Gm.wick(Pp).scale(sc(2) * inv_r)
        + dPm.wick(Pp).scale(inv_r)
        + dPp.wick(Pm).scale(inv_r)
        + E.derivative().wick(N)
        - N.wick(Pp.wick(Pm)).scale(sc(2) * inv_r)
        + N.wick(N.wick(E))
        - E.wick(Pp.wick(Pm)).scale(inv_r)
        + N.wick(E.wick(E))
    ).scale(half)
    X0 = X0 - (
        E.derivative().derivative().scale(ONE - sc(2) * k2)
        + E.derivative().wick(E).scale(sc(3) - sc(2) * k2)
        + E.wick(E.wick(E)).scale(ONE - k2)
    ).scale(ONE / (k2 * sc(8)))
    Xp = (
        N.wick(dPp)
        - H.wick(Pp).scale(sc(2))
        - N.wick(Gp).scale(sc(2))
        + T.wick(Pp)
        - E.wick(Gp)
        - N.wick(N.wick(Pp))
        - N.wick(E.wick(Pp))
    ).scale(half)
    Xp = Xp - (
        dPp.derivative().scale(sc(2) + sc(2) * k2)
        - E.derivative().wick(Pp)
        - E.wick(dPp).scale(sc(2) + sc(2) * k2)
        - E.wick(E.wick(Pp)).scale(ONE - k2)
    ).scale(ONE / (k2 * sc(8)))
    Xm = (
        N.wick(Gm).scale(sc(2))
        - N.wick(dPm)
        - H.wick(Pm).scale(sc(2))
        + T.wick(Pm)
        + E.wick(Gm)
        - N.wick(N.wick(Pm))
        - N.wick(E.wick(Pm))
    ).scale(half)
    Xm = Xm + (
        -dPm.derivative().scale(sc(2) + sc(2) * k2)
        + E.derivative().wick(Pm).scale(sc(5))
        - E.wick(dPm).scale(sc(2) + sc(2) * k2)
        + E.wick(E.wick(Pm)).scale(ONE - k2)
    ).scale(ONE / (k2 * sc(8)))
    X2 = (
        N.derivative().derivative().scale(sc(3))
        - T.derivative().scale(sc(2) + sc(2) * k2)
        + dPm.wick(Pp).scale(sc(4) * inv_r)
        - dPp.wick(Pm).scale(sc(4) * inv_r)
        + N.derivative().wick(E).scale(sc(4))
        + E.derivative().wick(N).scale(sc(4))
        + E.derivative().wick(E).scale(sc(2))
    )
    return {"X0": X0, "X+": Xp, "X-": Xm, "X2": X2}


def w2_table_checks(f, k, r=ONE, report=None, prefix="") -> Report:
    """Verify the complete n=2 OPE table against the eight fields.

    k is the level entering the structure constants; r the square of the
    odd-field rescaling (engine odd fields are s*field with s^2 = r, so an
    odd-odd OPE picks up a factor r and composites are corrected in
    w2_composites)."""
    rep = report or Report("w2opes")
    r = sc(r)
    E, N, T, H = f["E"], f["N"], f["T"], f["H"]
    Pp, Pm, Gp, Gm = f["Psi+"], f["Psi-"], f["G+"], f["G-"]
    alg = E.algebra
    X = w2_composites(f, k, r)
    one = alg.one
    k2 = k * k
    half = sc(Fraction(1, 2))
    quarter = sc(Fraction(1, 4))

    def chk(cid, got, want):
        want = {p: e for p, e in want.items() if e}
        ok = got == want
        detail = ""
        if not ok:
            poles = sorted(set(got) | set(want), reverse=True)
            diffs = [str(p) for p in poles if got.get(p, alg.zero) != want.get(p, alg.zero)]
            detail = "mismatch at pole(s) " + ", ".join(diffs)
        rep.add(prefix + cid, ok, detail)

    # current sector: gl(1|1) with doubled central terms and <N,N> = 0
    chk("E.E", E.ope(E), {})
    chk("E.N", E.ope(N), {2: one.scale(sc(2))})
    chk("N.N", N.ope(N), {})
    chk("E.Psi+", E.ope(Pp), {})
    chk("E.Psi-", E.ope(Pm), {})
    chk("N.Psi+", N.ope(Pp), {1: Pp})
    chk("N.Psi-", N.ope(Pm), {1: -Pm})
    chk("Psi+.Psi-", Pp.ope(Pm), {2: one.scale(sc(2) * r), 1: E.scale(r)})
    # Virasoro sector
    chk("T.T", T.ope(T), {2: T.scale(sc(2)), 1: T.derivative()})
    chk("T.G+", T.ope(Gp), {2: Gp.scale(sc(2)), 1: Gp.derivative()})
    chk("T.G-", T.ope(Gm), {2: Gm.scale(sc(2)), 1: Gm.derivative()})
    chk(
        "T.H",
        T.ope(H),
        {
            4: one.scale(sc(3) / k2 - ONE),
            3: E.scale(sc(Fraction(3, 4)) / k2),
            2: H.scale(sc(2)),
            1: H.derivative(),
        },
    )
    # currents against the dimension-two fields
    chk(
        "N.H",
        N.ope(H),
        {3: one.scale(sc(Fraction(3, 2)) / k2), 2: E.scale(-(quarter - sc(Fraction(3, 4)) / k2))},
    )
    chk("N.G+", N.ope(Gp), {1: Gp})
    chk("N.G-", N.ope(Gm), {1: -Gm})
    chk("Psi+.H", Pp.ope(H), {1: -Gp})
    chk("Psi-.H", Pm.ope(H), {1: -Gm})
    chk("Psi+.G-", Pp.ope(Gm), {2: N.scale(r), 1: T.scale(r)})
    chk("Psi-.G+", Pm.ope(Gp), {2: N.scale(r), 1: T.scale(-r)})
    chk("E.H", E.ope(H), {2: -N})
    chk("E.G+", E.ope(Gp), {2: -Pp})
    chk("E.G-", E.ope(Gm), {2: Pm})
    # dimension-two fields against each other
    hh2 = (
        E.derivative().scale(sc(2))
        + N.derivative().scale(sc(3))
        - T.scale(sc(2) * k2 + sc(2))
        + N.wick(E).scale(sc(4))
        + E.wick(E)
        - Pp.wick(Pm).scale(sc(4) / r)
    ).scale(-quarter / k2)
    chk("H.H", H.ope(H), {2: hh2, 1: X["X2"].scale(-ONE / (k2 * sc(8)))})
    chk(
        "H.G+",
        H.ope(Gp),
        {
            3: Pp.scale(half - sc(Fraction(3, 4)) / k2),
            2: Pp.derivative().scale(quarter - sc(Fraction(3, 4)) / k2),
            1: Gp.derivative() + X["X+"],
        },
    )
    chk(
        "H.G-",
        H.ope(Gm),
        {
            3: Pm.scale(half - sc(Fraction(9, 4)) / k2),
            2: Pm.derivative().scale(quarter - sc(Fraction(3, 4)) / k2),
            1: Gm.derivative() + X["X-"],
        },
    )
    chk(
        "G+.G-",
        Gp.ope(Gm),
        {
            4: one.scale(-r * (ONE - sc(3) / k2)),
            3: E.scale(-r * (half - sc(Fraction(3, 2)) / k2)),
            2: (H.scale(sc(2)) - E.derivative().scale(quarter)).scale(r),
            1: (H.derivative() + X["X0"]).scale(r),
        },
    )
    return rep


def verify_w2_opes(report=None) -> Report:
    """The complete rank-2 OPE table with symbolic k."""
    alg = build_M(2)
    f = build_W2_basis(alg)
    return w2_table_checks(f, alg.level, report=report)


# ---------------------------------------------------------------------
# expressing fields in generator words, and the large-level limit


GEN_ORDER = ("E", "N", "Psi+", "Psi-", "F+", "F-")


def generator_words(fields: dict, order, w):
    """Normally ordered words of total weight w in the given fields and
    their derivatives; returns (labels, exprs).  `order` fixes the letter
    order (odd fields never repeat)."""
    w = Fraction(w)
    letters = []
    for name in order:
        fw = fields[name].weight()
        d = 0
        while fw + d <= w:
            letters.append((name, d))
            d += 1
    out = []

    def parity(name):
        return fields[name].parity()

    def rec(start, remaining, acc):
        if remaining == 0:
            out.append(tuple(acc))
            return
        for idx in range(start, len(letters)):
            name, d = letters[idx]
            lw = fields[name].weight() + d
            if lw > remaining or lw == 0:
                continue
            if acc and acc[-1] == (name, d) and parity(name):
                continue
            acc.append((name, d))
            rec(idx, remaining - lw, acc)
            acc.pop()

    rec(0, w, [])
    out.sort()
    alg = next(iter(fields.values())).algebra
    exprs = []
    for word in out:
        e = alg.one
        for name, d in reversed(word):
            x = fields[name]
            for _ in range(d):
                x = x.derivative()
            e = x.wick(e)
        exprs.append(e)
    return out, exprs


def express_in_words(words, exprs, target):
    """Unique coordinates of target in the span of exprs; raises if the
    word images are dependent or target lies outside the span."""
    monos = sorted({m for e in exprs for m in e.terms} | set(target.terms))
    rows = [[e.terms.get(m, ZERO) for e in exprs] for m in monos]
    if rank([list(r) for r in rows], len(exprs), ONE) != len(exprs):
        raise ValueError("generator words are linearly dependent")
    rhs = [target.terms.get(m, ZERO) for m in monos]
    x = solve(rows, rhs, len(exprs), ZERO, ONE)
    if x is None:
        raise ValueError("target is outside the span of the generator words")
    return dict(zip(words, x))


def free_limit_fields(n):
    """The large-level limits of the generators inside the rank-n
    bc-beta-gamma system (plus the limits of T and H at n = 2)."""
    from .free import build_free

    alg = build_free(n)
    E = alg.zero
    N = alg.zero
    Pp = alg.zero
    Pm = alg.zero
    Fp = alg.zero
    Fm = alg.zero
    half = sc(Fraction(1, 2))
    quarter = sc(Fraction(1, 4))

    # the engine has beta(z)gamma(w) ~ +(z-w)^{-1}; the images below are
    # composed with the sign automorphism gamma -> -gamma of the free system
    def color(i):
        b, c = alg.gen("b", i), alg.gen("c", i)
        be, ga = alg.gen("beta", i), alg.gen("gamma", i)
        Ei = -b.wick(c) + be.wick(ga)
        Ni = -b.wick(c)
        ppi = -b.wick(ga)
        pmi = c.wick(be)
        return Ei, Ni, ppi, pmi

    for i in range(1, n + 1):
        Ei, Ni, ppi, pmi = color(i)
        b, c = alg.gen("b", i), alg.gen("c", i)
        be, ga = alg.gen("beta", i), alg.gen("gamma", i)
        E = E - Ei
        N = N - Ni
        Pp = Pp + ppi
        Pm = Pm + pmi
        Fp = Fp - b.wick(ga.derivative())
        Fm = Fm + be.wick(c.derivative())
    out = {"E": E, "N": N, "Psi+": Pp, "Psi-": Pm, "F+": Fp, "F-": Fm}
    if n == 2:
        E1, N1, p1, m1 = color(1)
        E2, N2, p2, m2 = color(2)
        out["T"] = (
            E1.wick(N1) + E2.wick(N2) - p1.wick(m1) - p2.wick(m2)
            - E1.derivative().scale(half) - E2.derivative().scale(half)
        )
        out["H"] = (
            N1.wick(N1) + N2.wick(N2) - E1.wick(N1) - E2.wick(N2)
            + p1.wick(m1) + p2.wick(m2)
        ).scale(-half) - (E1.derivative() + E2.derivative()).scale(quarter)
    return out


def word_expr(fields, word):
    """The right-nested normally ordered product for a (name, d) word."""
    alg = next(iter(fields.values())).algebra
    e = alg.one
    for name, d in reversed(word):
        x = fields[name]
        for _ in range(d):
            x = x.derivative()
        e = x.wick(e)
    return e


def expand_in_words(words, exprs, target):
    """Some coordinate vector of target in the span of exprs (words may be
    linearly dependent); None if target lies outside the span."""
    monos = sorted({m for e in exprs for m in e.terms} | set(target.terms))
    rows = [[e.terms.get(m, ZERO) for e in exprs] for m in monos]
    rhs = [target.terms.get(m, ZERO) for m in monos]
    x = solve(rows, rhs, len(exprs), ZERO, ONE)
    if x is None:
        return None
    return dict(zip(words, x))


def structure_constant_limits(fields, free, report, tag, names=GEN_ORDER):
    """For every OPE among the named generators: expand each pole
    coefficient in generator words, send the coefficients through
    limit_at_infinity, rebuild the word expression from the free-side
    images, and compare exactly against the free-side OPE."""
    from .coeff import DivergesError

    word_order = tuple(fields)
    caches = {}

    def words_at(w):
        if w not in caches:
            caches[w] = generator_words(fields, word_order, w)
        return caches[w]

    falg = next(iter(free.values())).algebra
    names = list(names)
    for ia, a in enumerate(names):
        for b in names[ia:]:
            fa, fb = fields[a], fields[b]
            table = fa.ope(fb)
            ftable = free[a].ope(free[b])
            poles = sorted(set(table) | {p for p, c in ftable.items() if c}, reverse=True)
            for pole in poles:
                cid = f"{a}.{b}.pole{pole}"
                coeff = table.get(pole)
                fwant = ftable.get(pole, falg.zero)
                if coeff is None:
                    report.add(f"{tag}.{cid}", not fwant, "pole missing entirely")
                    continue
                w = fa.weight() + fb.weight() - pole
                idp = coeff.identity_part()
                body = coeff - coeff.algebra.scalar_field(idp)
                coords = {}
                if body:
                    wds, exprs = words_at(w)
                    coords = expand_in_words(wds, exprs, body)
                    if coords is None:
                        report.add(f"{tag}.{cid}", False, "outside generator-word span")
                        continue
                got = falg.zero
                ok = True
                try:
                    v = idp.limit_at_infinity()
                    if v:
                        got = got + falg.scalar_field(sc(v))
                    for word, c in coords.items():
                        v = c.limit_at_infinity()
                        if v:
                            got = got + word_expr(free, word).scale(sc(v))
                except DivergesError:
                    report.add(f"{tag}.{cid}", False, "coefficient limit diverges")
                    continue
                report.add(
                    f"{tag}.{cid}",
                    got == fwant,
                    "limit differs from the free-field value",
                )


def w_limit_check(n, report=None) -> Report:
    """Large-level limit of the one-parameter algebra's structure constants
    among the six generators equals the free-field constants (n <= 2)."""
    r = report or Report("limits")
    free = free_limit_fields(n)
    alg = build_M(n)
    fields = build_W_generators(alg)
    if n == 2:
        full = build_W2_basis(alg)
        fields["T"] = full["T"]
        # the limit-side H matches the un-shifted current basis
        fields["H"] = full["H"]
    structure_constant_limits(fields, free, r, f"W{n}")
    return r
