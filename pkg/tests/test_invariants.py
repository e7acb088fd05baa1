"""Classical invariant-theory oracle: graded dimensions, the span of the
quadratic generators, and the vanishing of the classical relations."""

from fractions import Fraction

import pytest

from superw.invariants import (
    first_relation_weight,
    invariant_dim,
    verify_weyl,
    weyl_span_dim,
)


@pytest.mark.parametrize("n", [1, 2])
def test_invariant_dim_equals_weyl_span(n):
    w = Fraction(1, 2)
    while w <= 3:
        assert invariant_dim(n, w) == weyl_span_dim(n, w), f"n={n} w={w}"
        w += Fraction(1, 2)


@pytest.mark.parametrize("n", [1, 2])
def test_first_relation_weight(n):
    assert first_relation_weight(n) == n + Fraction(1, 2)


def test_low_weight_dims():
    # weight 1/2: the single odd invariant; weight 1: two even invariants
    assert invariant_dim(2, Fraction(1, 2)) == 1
    assert invariant_dim(2, 1) == 2
    assert invariant_dim(2, Fraction(3, 2)) == 5
    assert invariant_dim(2, 2) == 10


def test_verify_weyl_suite():
    rep = verify_weyl()
    assert rep.checks, "empty report"
    assert rep.passed, str(rep)
