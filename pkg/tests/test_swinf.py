"""The abstract current algebra on generators J[a,k], its free-field
realization, relation spaces, and the rank-2 decoupling formulas."""

from fractions import Fraction

import pytest

from superw.coeff import sc
from superw.swinf import (
    J,
    Realization,
    build_swinf,
    decouple,
    relation_space,
    singular_check,
    verify_decouple2,
    verify_realization,
    verify_relations,
)


def test_central_term():
    alg = build_swinf(sc(2), kmax=2)
    j0 = J(alg, "0", 0)
    assert j0.nprod(j0, 1) == alg.scalar_field(2)


def test_weights():
    alg = build_swinf(sc(1), kmax=3)
    assert J(alg, "0", 2).weight() == 3
    assert J(alg, "+", 1).weight() == Fraction(3, 2)
    assert J(alg, "-", 0).weight() == Fraction(3, 2)


@pytest.mark.parametrize("n", [1, 2])
def test_realization_matches_abstract_opes(n):
    rep = verify_realization(n, kmax=2)
    assert rep.checks, "empty report"
    assert rep.passed, str(rep)


@pytest.mark.parametrize("n", [1, 2])
def test_relation_space_dims(n):
    rl = Realization(n, kmax=max(4, n + 2))
    w = Fraction(1, 2)
    while w < n + Fraction(1, 2):
        assert relation_space(n, w, realization=rl) == [], f"weight {w}"
        w += Fraction(1, 2)
    vs = relation_space(n, n + Fraction(1, 2), realization=rl)
    assert len(vs) == 1
    assert singular_check(vs[0])


@pytest.mark.parametrize("n", [1, 2])
def test_verify_relations(n):
    rep = verify_relations(n)
    assert rep.passed, str(rep)


def test_decouple2_against_displayed_formulas():
    rep = verify_decouple2()
    assert len(rep.checks) == 5
    assert rep.passed, str(rep)


def test_decoupled_field_realizes_correctly():
    # the solved decoupling for j^{0,1} at n=1 maps to the same free field
    # as the generator it replaces
    rl = Realization(1, kmax=4)
    e = decouple(1, "0", 1, realization=rl)
    assert rl.map(e) == rl.map(J(rl.sw, "0", 1))
    # and only uses generators below the rank cutoff
    for mono in e.terms:
        for g, _ in mono:
            assert rl.sw.gens[g].indices[1] < 1
