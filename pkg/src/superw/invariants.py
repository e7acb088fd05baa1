"""Brute-force classical invariant theory on the associated graded
polynomial superalgebra of the rank-n free system.

Variables: commuting beta^i_j, gamma^i_j and anticommuting b^i_j, c^i_j
(i = 1..n color, j >= 0 derivative order), with weights j+5/6, j+1/6,
j+1/3, j+2/3.  beta and b carry the standard GL_n action, gamma and c the
dual one.  Everything is exact linear algebra over Q."""

from __future__ import annotations

from fractions import Fraction
from itertools import permutations

from .linalg import kernel_basis, rank
from .report import Report

# family -> (parity, standard?, weight offset)
FAMS = {
    "b": (1, True, Fraction(1, 3)),
    "c": (1, False, Fraction(2, 3)),
    "beta": (0, True, Fraction(5, 6)),
    "gamma": (0, False, Fraction(1, 6)),
}
_FAM_ORDER = {"b": 0, "c": 1, "beta": 2, "gamma": 3}

# q^a_{k,l} pairs: a -> (standard family, dual family)
Q_PAIRS = {"0": ("b", "c"), "1": ("beta", "gamma"), "+": ("b", "gamma"), "-": ("beta", "c")}
Q_PARITY = {"0": 0, "1": 0, "+": 1, "-": 1}


def var_weight(v) -> Fraction:
    fam, i, j = v
    return FAMS[fam][2] + j


def var_parity(v) -> int:
    return FAMS[v[0]][0]


def _var_key(v):
    return (_FAM_ORDER[v[0]], v[1], v[2])


def canonicalize(seq, parity=var_parity, key=_var_key):
    """Sort a variable sequence; returns (Koszul sign, tuple) or (0, None)
    for a repeated odd variable."""
    seq = list(seq)
    sign = 1
    # insertion sort, counting transpositions of odd pairs
    for i in range(1, len(seq)):
        j = i
        while j > 0 and key(seq[j - 1]) > key(seq[j]):
            if parity(seq[j - 1]) and parity(seq[j]):
                sign = -sign
            seq[j - 1], seq[j] = seq[j], seq[j - 1]
            j -= 1
    for a, b in zip(seq, seq[1:]):
        if a == b and parity(a):
            return 0, None
    return sign, tuple(seq)


def poly_add(p, q):
    out = dict(p)
    for m, c in q.items():
        nc = out.get(m, 0) + c
        if nc:
            out[m] = nc
        elif m in out:
            del out[m]
    return out


def poly_scale(p, c):
    if not c:
        return {}
    return {m: x * c for m, x in p.items()}


def poly_mul(p, q, parity=var_parity, key=_var_key):
    out = {}
    for m1, c1 in p.items():
        for m2, c2 in q.items():
            s, m = canonicalize(m1 + m2, parity, key)
            if not s:
                continue
            c = c1 * c2 * s
            nc = out.get(m, 0) + c
            if nc:
                out[m] = nc
            elif m in out:
                del out[m]
    return out


def weight_monomials(n, w):
    """All canonical monomials of total weight w in the graded variables."""
    w = Fraction(w)
    vars_ = []
    for fam, (_, _, off) in FAMS.items():
        j = 0
        while off + j <= w:
            for i in range(1, n + 1):
                vars_.append((fam, i, j))
            j += 1
    vars_.sort(key=_var_key)
    out = []

    def rec(start, remaining, acc):
        if remaining == 0:
            out.append(tuple(acc))
            return
        for idx in range(start, len(vars_)):
            v = vars_[idx]
            vw = var_weight(v)
            if vw > remaining:
                continue
            if acc and acc[-1] == v and var_parity(v):
                continue
            acc.append(v)
            rec(idx, remaining - vw, acc)
            acc.pop()

    rec(0, w, [])
    out.sort()
    return out


def e_action(p, q, mono):
    """The infinitesimal gl_n generator E_pq acting as an even derivation:
    standard variables e_i -> delta_{qi} e_p, dual ones e*_i -> -delta_{pi}
    e*_q."""
    out = {}
    for r, v in enumerate(mono):
        fam, i, j = v
        standard = FAMS[fam][1]
        if standard:
            if i != q:
                continue
            nv, c = (fam, p, j), 1
        else:
            if i != p:
                continue
            nv, c = (fam, q, j), -1
        s, m = canonicalize(mono[:r] + (nv,) + mono[r + 1 :])
        if not s:
            continue
        nc = out.get(m, 0) + c * s
        if nc:
            out[m] = nc
        elif m in out:
            del out[m]
    return out


def invariant_vectors(n, w):
    """Kernel vectors of all n^2 infinitesimal actions on the weight-w
    monomial space; returns (monomial basis, coefficient vectors).

    The action only permutes color indices, so the monomial space splits
    into small blocks indexed by the multiset of (family, order) letters;
    each block is solved independently."""
    basis = weight_monomials(n, w)
    if not basis:
        return [], []
    pos = {m: i for i, m in enumerate(basis)}
    blocks = {}
    for m in basis:
        shape = tuple(sorted((v[0], v[2]) for v in m))
        blocks.setdefault(shape, []).append(m)
    vecs = []
    for block in blocks.values():
        index = {m: i for i, m in enumerate(block)}
        rows = []
        for p in range(1, n + 1):
            for q in range(1, n + 1):
                images = [e_action(p, q, m) for m in block]
                targets = sorted({t for img in images for t in img})
                for t in targets:
                    rows.append(
                        [Fraction(images[c].get(t, 0)) for c in range(len(block))]
                    )
        if not rows:
            sub = [
                [Fraction(int(i == j)) for i in range(len(block))]
                for j in range(len(block))
            ]
        else:
            sub = kernel_basis(rows, len(block), Fraction(0), Fraction(1))
        for sv in sub:
            v = [Fraction(0)] * len(basis)
            for m, c in zip(block, sv):
                v[pos[m]] = c
            vecs.append(v)
    # sanity: every invariant balances standard against dual letters
    for v in vecs:
        counts = {
            sum(1 if FAMS[x[0]][1] else -1 for x in basis[i])
            for i, c in enumerate(v)
            if c
        }
        if counts and counts != {0}:
            raise AssertionError("computed invariant with unbalanced letters")
    return basis, vecs


def invariant_dim(n, w, cutoff=4) -> int:
    if Fraction(w) > cutoff:
        raise ValueError(f"weight {w} exceeds cutoff {cutoff}")
    return len(invariant_vectors(n, w)[1])


def q_poly(n, a, k, l):
    """q^a_{k,l} = sum_i (standard)_i_k (dual)_i_l as a graded polynomial."""
    sf, df = Q_PAIRS[a]
    out = {}
    for i in range(1, n + 1):
        s, m = canonicalize(((sf, i, k), (df, i, l)))
        out[m] = out.get(m, 0) + s
    return out


def q_weight(a, k, l) -> Fraction:
    sf, df = Q_PAIRS[a]
    return FAMS[sf][2] + k + FAMS[df][2] + l


def _q_letter_key(v):
    return (v[0], v[1], v[2])


def _q_letter_parity(v):
    return Q_PARITY[v[0]]


def q_letters_upto(w):
    w = Fraction(w)
    out = []
    for a in Q_PAIRS:
        k = 0
        while q_weight(a, k, 0) <= w:
            l = 0
            while q_weight(a, k, l) <= w:
                out.append((a, k, l))
                l += 1
            k += 1
    out.sort(key=_q_letter_key)
    return out


def q_monomials(w):
    """Canonical monomials in the formal Q variables of total weight w
    (the free polynomial model)."""
    w = Fraction(w)
    letters = q_letters_upto(w)
    out = []

    def rec(start, remaining, acc):
        if remaining == 0:
            out.append(tuple(acc))
            return
        for idx in range(start, len(letters)):
            v = letters[idx]
            vw = q_weight(*v)
            if vw > remaining:
                continue
            if acc and acc[-1] == v and _q_letter_parity(v):
                continue
            acc.append(v)
            rec(idx, remaining - vw, acc)
            acc.pop()

    rec(0, w, [])
    return out


def free_model_dim(w) -> int:
    return len(q_monomials(w))


def substitute_q(n, qmono):
    """Image of a product of Q letters under Q^a_{k,l} -> q^a_{k,l}."""
    out = {(): Fraction(1)}
    for a, k, l in qmono:
        out = poly_mul(out, q_poly(n, a, k, l))
    return out


def weyl_span_dim(n, w, cutoff=4) -> int:
    """Dimension of the span of the substituted Q monomials of weight w."""
    if Fraction(w) > cutoff:
        raise ValueError(f"weight {w} exceeds cutoff {cutoff}")
    images = [substitute_q(n, qm) for qm in q_monomials(w)]
    targets = sorted({m for img in images for m in img})
    if not targets:
        return 0
    rows = [[img.get(t, Fraction(0)) for t in targets] for img in images]
    return rank(rows, len(targets), Fraction(1))


def first_relation_weight(n, cutoff=4) -> Fraction:
    w = Fraction(1, 2)
    while w <= cutoff:
        if weyl_span_dim(n, w, cutoff) < free_model_dim(w):
            return w
        w += Fraction(1, 2)
    raise RuntimeError(f"no relation found up to weight {cutoff}")


def build_classical_relation(n, I, J, I_parities, J_parities):
    """The degree-(n+1) relation d_{I,J} in the formal Q variables.

    I, J are lists of n+1 nonnegative integers; parities are strings of
    'b'/'f' flags per entry (bosonic/fermionic).  The polynomial is the
    alternating sum over column permutations whose coefficients are solved
    from the condition that the Q -> q substitution vanishes, normalized so
    the identity permutation has coefficient +1.  For all-bosonic input this
    reproduces the determinant in Q^1."""
    if len(I) != n + 1 or len(J) != n + 1:
        raise ValueError("index lists must have length n+1")
    for lst, par in ((I, I_parities), (J, J_parities)):
        seen = [v for v, p in zip(lst, par) if p == "b"]
        if len(seen) != len(set(seen)):
            raise ValueError("repeated bosonic index")

    def q_label(rp, cp):
        # (row parity, column parity): row=standard side, column=dual side
        return {("f", "f"): "0", ("b", "b"): "1", ("f", "b"): "+", ("b", "f"): "-"}[(rp, cp)]

    # products of Q letters per permutation, kept in row order with Koszul
    # canonicalization
    perm_monos = []
    for sigma in permutations(range(n + 1)):
        seq = [
            (q_label(I_parities[r], J_parities[sigma[r]]), I[r], J[sigma[r]])
            for r in range(n + 1)
        ]
        s, m = canonicalize(seq, _q_letter_parity, _q_letter_key)
        perm_monos.append((sigma, s, m))
    support = sorted({m for _, s, m in perm_monos if s})
    if not support:
        raise ValueError("all permutation products vanish identically")
    # solve: sum_m x_m * substitute(m) = 0, kernel expected one-dimensional
    images = [substitute_q(n, m) for m in support]
    targets = sorted({t for img in images for t in img})
    rows = [[images[c].get(t, Fraction(0)) for c in range(len(support))] for t in targets]
    vecs = kernel_basis(rows, len(support), Fraction(0), Fraction(1))
    if len(vecs) != 1:
        raise ValueError(
            f"relation space for these indices has dimension {len(vecs)}, expected 1"
        )
    v = vecs[0]
    # normalize: identity permutation monomial coefficient +1
    ident = next(m for sigma, s, m in perm_monos if sigma == tuple(range(n + 1)) and s)
    idx = support.index(ident)
    if not v[idx]:
        raise ValueError("identity permutation term missing from the relation")
    inv = 1 / v[idx]
    poly = {m: c * inv for m, c in zip(support, v) if c}
    return poly


def relation_symmetry_ok(n, I, J, I_parities, J_parities) -> bool:
    """Transposing two bosonic entries flips the sign of d_{I,J};
    transposing two fermionic entries leaves it unchanged."""
    base = build_classical_relation(n, I, J, I_parities, J_parities)

    def swapped(lst, i, j):
        lst = list(lst)
        lst[i], lst[j] = lst[j], lst[i]
        return lst

    for which in ("I", "J"):
        lst = I if which == "I" else J
        par = I_parities if which == "I" else J_parities
        for i in range(n + 1):
            for j in range(i + 1, n + 1):
                if par[i] != par[j] or (lst[i], par[i]) == (lst[j], par[j]):
                    continue
                if which == "I":
                    other = build_classical_relation(n, swapped(I, i, j), J,
                                                     swapped(I_parities, i, j), J_parities)
                else:
                    other = build_classical_relation(n, I, swapped(J, i, j),
                                                     I_parities, swapped(J_parities, i, j))
                want = poly_scale(base, -1 if par[i] == "b" else 1)
                if other != want:
                    return False
    return True


def verify_weyl(n_max=2, w_max=3, report=None) -> Report:
    """First and second fundamental theorem checks at desk scale."""
    r = report or Report("weyl")
    for n in range(1, n_max + 1):
        w = Fraction(0)
        while w <= w_max:
            di = invariant_dim(n, w, cutoff=w_max)
            ds = weyl_span_dim(n, w, cutoff=w_max)
            r.add(f"fft.n={n}.w={w}", di == ds, f"invariant dim {di} != span dim {ds}")
            w += Fraction(1, 2)
        w = Fraction(1, 2)
        while w < Fraction(2 * n + 1, 2):
            ds = weyl_span_dim(n, w, cutoff=w_max + 2)
            fm = free_model_dim(w)
            r.add(f"sft.free.n={n}.w={w}", ds == fm, f"span {ds} != free model {fm}")
            w += Fraction(1, 2)
        frw = first_relation_weight(n)
        r.add(f"first.relation.n={n}", frw == Fraction(2 * n + 1, 2), f"got {frw}")
    # distinguished degree-(n+1) relations with all indices zero
    for n in range(1, n_max + 1):
        zeros = [0] * (n + 1)
        configs = {
            "plus": ("f" * (n + 1), "b" + "f" * n),
            "minus": ("b" + "f" * n, "f" * (n + 1)),
            "zero": ("f" * (n + 1), "f" * (n + 1)),
            "one": ("b" + "f" * n, "b" + "f" * n),
        }
        for name, (ip, jp) in configs.items():
            try:
                d = build_classical_relation(n, zeros, zeros, list(ip), list(jp))
                total = {}
                for m, c in d.items():
                    total = poly_add(total, poly_scale(substitute_q(n, m), c))
                r.add(f"d.{name}.n={n}", not total, "substitution residue nonzero")
            except ValueError as exc:
                r.add(f"d.{name}.n={n}", False, str(exc))
    return r
