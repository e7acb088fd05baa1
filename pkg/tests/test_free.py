"""Free-field systems: pairings, conformal structure, the embedded
current and superconformal families."""

from fractions import Fraction

import pytest

from superw.coeff import ONE, sc
from superw.free import (
    build_free,
    central_charge,
    check_primary,
    conformal_vector,
    gl11_fields,
    j_field,
    n2_fields,
    verify_gl11,
    verify_n2,
)


def test_pairings():
    alg = build_free(2)
    b1, c1 = alg.gen("b", 1), alg.gen("c", 1)
    be1, ga1 = alg.gen("beta", 1), alg.gen("gamma", 1)
    assert b1.ope(c1) == {1: alg.one}
    assert c1.ope(b1) == {1: alg.one}
    assert be1.ope(ga1) == {1: alg.one}
    assert ga1.ope(be1) == {1: -alg.one}
    assert b1.ope(alg.gen("c", 2)) == {}
    assert b1.ope(be1) == {}


def test_weights():
    alg = build_free(1)
    assert alg.gen("b", 1).weight() == Fraction(1, 3)
    assert alg.gen("c", 1).weight() == Fraction(2, 3)
    assert alg.gen("beta", 1).weight() == Fraction(5, 6)
    assert alg.gen("gamma", 1).weight() == Fraction(1, 6)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_central_charge_is_rank(n):
    L = conformal_vector(build_free(n))
    assert central_charge(L) == sc(n)


def test_generators_primary():
    alg = build_free(1)
    L = conformal_vector(alg)
    for name, w in (("b", Fraction(1, 3)), ("c", Fraction(2, 3)),
                    ("beta", Fraction(5, 6)), ("gamma", Fraction(1, 6))):
        assert check_primary(L, alg.gen(name, 1), w)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_gl11_relations(n):
    rep = verify_gl11(gl11_fields(build_free(n)), n)
    assert len(rep.checks) == 7
    assert rep.passed, str(rep)


@pytest.mark.parametrize("n", [1, 2])
def test_n2_relations(n):
    rep = verify_n2(n2_fields(build_free(n)), n)
    assert rep.passed, str(rep)


def test_j_field_values():
    alg = build_free(1)
    j0 = j_field(alg, "0", 0)
    j1 = j_field(alg, "1", 0)
    jp = j_field(alg, "+", 0)
    jm = j_field(alg, "-", 0)
    # the odd current pair pairs at level n with first-order pole -(j0+j1)
    assert jp.nprod(jm, 1) == alg.one
    assert jp.nprod(jm, 0) == -(j0 + j1)
    # opposite unit charges under the fermion-number current
    assert j0.nprod(jp, 0) == -jp
    assert j0.nprod(jm, 0) == jm
