"""Free-field systems: rank-n bc and beta-gamma algebras, their tensor
product, one-parameter conformal structures, and the embedded gl(1|1) and
N=2 superconformal field families."""

from __future__ import annotations

from fractions import Fraction

from .coeff import ONE, sc
from .fields import Algebra, Generator
from .report import Report, poles_str

LAMBDA_S = Fraction(5, 6)
LAMBDA_E = Fraction(1, 3)


def build_free(n, kind="bcbg", lam_s=LAMBDA_S, lam_e=LAMBDA_E) -> Algebra:
    """Register the rank-n bc system, beta-gamma system, or their tensor.

    Pairings: b^i(z)c^j(w) ~ delta_ij/(z-w), beta^i(z)gamma^j(w) ~
    delta_ij/(z-w); reverse orientations follow by skew-symmetry."""
    if n < 1:
        raise ValueError("rank must be positive")
    gens, opes = [], {}
    if kind in ("bc", "bcbg"):
        for i in range(1, n + 1):
            gens.append(Generator("b", (i,), parity=1, weight=lam_e))
            gens.append(Generator("c", (i,), parity=1, weight=1 - lam_e))
            opes[(("b", i), ("c", i))] = {0: [(1, [])]}
    if kind in ("betagamma", "bcbg"):
        for i in range(1, n + 1):
            gens.append(Generator("beta", (i,), parity=0, weight=lam_s))
            gens.append(Generator("gamma", (i,), parity=0, weight=1 - lam_s))
            opes[(("beta", i), ("gamma", i))] = {0: [(1, [])]}
    if kind not in ("bc", "betagamma", "bcbg"):
        raise ValueError(f"unknown kind {kind!r}")
    alg = Algebra(gens, opes, tag=f"{kind}:{n}")
    alg.rank = n
    alg.kind = kind
    alg.lam_s = lam_s
    alg.lam_e = lam_e
    return alg


def conformal_vector(alg, lam_s=None, lam_e=None):
    """L = L^S_{lam_s} + L^E_{lam_e} (single summand for pure systems):
    L^S = lam*sum :beta d(gamma): + (lam-1)*sum :d(beta) gamma:,
    L^E = (1-lam)*sum :d(b) c: - lam*sum :b d(c):."""
    n = alg.rank
    L = alg.zero
    if alg.kind in ("bc", "bcbg"):
        lam = Fraction(alg.lam_e if lam_e is None else lam_e)
        for i in range(1, n + 1):
            bi, ci = alg.generator("b", i).index, alg.generator("c", i).index
            L = L + alg.normal_form([(bi, 1), (ci, 0)]).scale(1 - lam)
            L = L + alg.normal_form([(bi, 0), (ci, 1)]).scale(-lam)
    if alg.kind in ("betagamma", "bcbg"):
        lam = Fraction(alg.lam_s if lam_s is None else lam_s)
        for i in range(1, n + 1):
            gi = alg.generator("beta", i).index, alg.generator("gamma", i).index
            L = L + alg.normal_form([(gi[0], 0), (gi[1], 1)]).scale(lam)
            L = L + alg.normal_form([(gi[0], 1), (gi[1], 0)]).scale(lam - 1)
    return L


def central_charge(L):
    """Read c from L(z)L(w) ~ (c/2)(z-w)^-4 + 2L(z-w)^-2 + dL(z-w)^-1,
    after checking the Virasoro axioms."""
    alg = L.algebra
    problems = []
    p4 = L.nprod(L, 3)
    if set(p4.terms) - {()}:
        problems.append("fourth-order pole is not a multiple of the identity")
    if L.nprod(L, 2):
        problems.append("third-order pole is nonzero")
    if L.nprod(L, 1) != L.scale(2):
        problems.append("second-order pole is not 2L")
    if L.nprod(L, 0) != L.derivative():
        problems.append("first-order pole is not dL")
    if problems:
        raise ValueError("not a Virasoro field: " + "; ".join(problems))
    return p4.identity_part() * sc(2)


def check_primary(L, a, w) -> bool:
    """True iff a is primary of weight w for L: L o_1 a = w*a, L o_0 a = da,
    and all higher poles vanish."""
    if L.nprod(a, 1) != a.scale(Fraction(w)):
        return False
    if L.nprod(a, 0) != a.derivative():
        return False
    bound = int(L.weight() + a.weight()) + 1
    return all(not L.nprod(a, n) for n in range(2, bound + 1))


def j_field(alg, a, k):
    """The realized generator j^{a,k} in the rank-n bc-beta-gamma system:
    j^{0,k} = -sum :b^i d^k c^i:, j^{1,k} = sum :beta^i d^k gamma^i:,
    j^{+,k} = -sum :b^i d^k gamma^i:, j^{-,k} = sum :beta^i d^k c^i:."""
    first, second, signed = {
        "0": ("b", "c", True),
        "1": ("beta", "gamma", False),
        "+": ("b", "gamma", True),
        "-": ("beta", "c", False),
    }[str(a)]
    out = alg.zero
    for i in range(1, alg.rank + 1):
        fi = alg.generator(first, i).index
        si = alg.generator(second, i).index
        out = out + alg.normal_form([(fi, 0), (si, k)])
    return -out if signed else out


def gl11_fields(alg):
    return {a: j_field(alg, a, 0) for a in ("0", "1", "+", "-")}


def _expect(report, cid, got: dict, want: dict):
    ok = got == {p: e for p, e in want.items() if e}
    detail = "" if ok else f"got {poles_str(got)}; expected {poles_str(want)}"
    report.add(cid, ok, detail)


def verify_gl11(fields, c, report=None) -> Report:
    """All seven OPEs of the gl(1|1) current algebra at level c."""
    r = report or Report("gl11")
    j0, j1, jp, jm = fields["0"], fields["1"], fields["+"], fields["-"]
    alg = j0.algebra
    cid = alg.scalar_field(sc(c))
    _expect(r, "J0.J0", j0.ope(j0), {2: cid})
    _expect(r, "J1.J1", j1.ope(j1), {2: -cid})
    _expect(r, "J0.J-", j0.ope(jm), {1: jm})
    _expect(r, "J0.J+", j0.ope(jp), {1: -jp})
    _expect(r, "J1.J-", j1.ope(jm), {1: -jm})
    _expect(r, "J1.J+", j1.ope(jp), {1: jp})
    _expect(r, "J+.J-", jp.ope(jm), {2: cid, 1: -(j0 + j1)})
    return r


def n2_fields(alg):
    """The N=2 superconformal fields inside the rank-n system:
    F = (2/3)j^{0,0} - (1/3)j^{1,0}, G+ = j^{-,0},
    G- = -j^{+,1} + (1/3)d j^{+,0},
    L = j^{0,1} + j^{1,1} - (2/3)d j^{0,0} - (1/6)d j^{1,0}."""
    j = lambda a, k: j_field(alg, a, k)
    F = j("0", 0).scale(Fraction(2, 3)) - j("1", 0).scale(Fraction(1, 3))
    L = (
        j("0", 1)
        + j("1", 1)
        - j("0", 0).derivative().scale(Fraction(2, 3))
        - j("1", 0).derivative().scale(Fraction(1, 6))
    )
    Gp = j("-", 0)
    Gm = -j("+", 1) + j("+", 0).derivative().scale(Fraction(1, 3))
    return {"F": F, "L": L, "G+": Gp, "G-": Gm}


def verify_n2(fields, c, report=None) -> Report:
    """The N=2 superconformal OPE relations at central charge c."""
    r = report or Report("n2")
    F, L, Gp, Gm = fields["F"], fields["L"], fields["G+"], fields["G-"]
    alg = F.algebra
    c = sc(c)
    c3 = alg.scalar_field(c / sc(3))
    _expect(r, "F.F", F.ope(F), {2: c3})
    _expect(r, "G+.G+", Gp.ope(Gp), {})
    _expect(r, "G-.G-", Gm.ope(Gm), {})
    _expect(r, "F.G+", F.ope(Gp), {1: Gp})
    _expect(r, "F.G-", F.ope(Gm), {1: -Gm})
    _expect(
        r,
        "G+.G-",
        Gp.ope(Gm),
        {3: c3, 2: F, 1: L + F.derivative().scale(Fraction(1, 2))},
    )
    try:
        cc = central_charge(L)
        r.add("L.Virasoro", cc == c, f"central charge {cc}, expected {c}")
    except ValueError as exc:
        r.add("L.Virasoro", False, str(exc))
    r.add("L.equals.LF", L == conformal_vector(alg), "embedded L differs from L^F")
    return r
