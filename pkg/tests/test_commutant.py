"""Affine current algebras, the diagonal embedding into the affine plus
free tensor algebra, its commutant, and the two identification
theorems."""

from fractions import Fraction

import pytest

from superw.coeff import K, ONE, sc
from superw.commutant import (
    B_generators,
    b_limit_check,
    build_affine,
    build_tensor,
    check_lie_data,
    commutant_basis,
    diagonal_check,
    diagonal_currents,
    gl_data,
    gl_super_data,
    identify_W2_B2,
    in_commutant,
    phi_projection,
    remark_gl22_check,
    remark_gl22_fields,
    t_field,
    verify_B_generators,
)
from superw.fields import EngineError
from superw.free import j_field
from superw.invariants import invariant_dim
from superw.linalg import rank as mat_rank


def test_lie_data_validates():
    check_lie_data(gl_data(2))
    check_lie_data(gl_data(3))
    check_lie_data(gl_super_data(2))


def test_affine_gl2_examples():
    alg = build_affine(gl_data(2), K)
    x12, x21, x11 = alg.gen("X", 1, 2), alg.gen("X", 2, 1), alg.gen("X", 1, 1)
    assert x12.nprod(x21, 1) == alg.scalar_field(K)
    assert x11.nprod(x12, 0) == x12
    assert x12.nprod(x21, 0) == x11 - alg.gen("X", 2, 2)
    assert x11.nprod(x11, 1) == alg.scalar_field(K)


def test_affine_gl22_examples():
    alg = build_affine(gl_super_data(2), -2)
    e13, e31 = alg.gen("E", 1, 3), alg.gen("E", 3, 1)
    # odd pairing at level -2: supertrace form value 1 on this pair
    assert e13.nprod(e31, 1) == alg.scalar_field(-2)
    assert e13.nprod(e31, 0) == alg.gen("E", 1, 1) + alg.gen("E", 3, 3)
    # equal odd currents are regular with themselves
    assert e13.ope(e13) == {}


def test_diagonal_currents_close_at_shifted_level():
    alg = build_tensor(2, K)
    rep = diagonal_check(alg)
    assert rep.checks, "empty report"
    assert rep.passed, str(rep)


def test_commutant_dims_match_invariant_oracle():
    alg = build_tensor(2, K)
    for w, expect in ((Fraction(1, 2), 1), (Fraction(1), 2), (Fraction(3, 2), 5)):
        basis = commutant_basis(alg, w)
        assert len(basis) == expect, f"weight {w}"
        assert invariant_dim(2, w) == expect


def test_B_generators_membership():
    rep = verify_B_generators(2)
    assert rep.passed, str(rep)


def test_projection_injective_on_weight2_commutant():
    alg = build_tensor(2, K)
    basis = commutant_basis(alg, Fraction(2))
    assert len(basis) == invariant_dim(2, 2) == 10
    projected = [phi_projection(v) for v in basis]
    monos = sorted({m for e in projected for m in e.terms})
    rows = [[e.terms.get(m, sc(0)) for e in projected] for m in monos]
    assert mat_rank(rows, len(projected), ONE) == len(projected)


@pytest.mark.parametrize("a,l", [("0", 0), ("1", 0), ("+", 0), ("-", 0), ("0", 1), ("1", 1)])
def test_t_field_membership_and_limit(a, l):
    alg = build_tensor(2, K)
    t = t_field(alg, a, l)
    assert in_commutant(alg, t)
    # the affine part vanishes in the large-level limit, leaving the free
    # current
    limit = alg.zero
    for mono, c in phi_projection(t).terms.items():
        limit = limit + type(t)(alg, {mono: sc(c.limit_at_infinity())})
    assert limit == j_field(alg, a, l)


def test_identify_w2b2_symbolic():
    rep = identify_W2_B2()
    assert len(rep.checks) == 26
    assert rep.passed, str(rep)


@pytest.mark.parametrize("kval", [1, 3, -5])
def test_identify_w2b2_numeric(kval):
    rep = identify_W2_B2(kval)
    assert rep.passed, str(rep)


def test_gl22_remark():
    rep = remark_gl22_check()
    assert len(rep.checks) == 26
    assert rep.passed, str(rep)


def test_gl22_fields_commute_with_sl2():
    alg = build_affine(gl_super_data(2), -2)
    f = remark_gl22_fields(alg)
    g = alg.gen
    je = g("E", 1, 2) + g("E", 3, 4)
    jf = g("E", 2, 1) + g("E", 4, 3)
    jh = g("E", 1, 1) - g("E", 2, 2) + g("E", 3, 3) - g("E", 4, 4)
    # the embedded sl(2) has level 0
    assert not je.nprod(jf, 1)
    assert je.nprod(jf, 0) == jh
    for name, v in f.items():
        for cur in (je, jf, jh):
            bound = int(cur.weight() + v.weight())
            for m in range(bound + 1):
                assert not cur.nprod(v, m), f"{name} fails at mode {m}"


@pytest.mark.parametrize("n", [1, 2])
def test_b_structure_constant_limits(n):
    rep = b_limit_check(n)
    assert rep.checks, "empty report"
    assert rep.passed, str(rep)


def test_bad_lie_data_rejected():
    d = gl_data(2)
    d.form[(("X", 1, 2), ("X", 2, 1))] = sc(5)
    with pytest.raises(EngineError):
        check_lie_data(d)
