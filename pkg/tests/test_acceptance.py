"""Acceptance gate: twelve end-to-end checks, each verified by exact
symbolic equality."""

from fractions import Fraction

import pytest

import test_fields as engine_props

from superw.commutant import b_limit_check, identify_W2_B2, remark_gl22_check
from superw.free import build_free, gl11_fields, n2_fields, verify_gl11, verify_n2
from superw.invariants import first_relation_weight, invariant_dim, verify_weyl, weyl_span_dim
from superw.lattice import (
    verify_kernel_theorem,
    verify_q1,
    verify_q2,
    verify_w2_opes,
    w_limit_check,
)
from superw.swinf import (
    Realization,
    relation_space,
    singular_check,
    verify_decouple2,
    verify_realization,
)


def _passes(rep):
    assert rep.checks, "empty report"
    assert rep.passed, str(rep)


# 1. seven current-algebra OPEs in the free-field realization, c = n
@pytest.mark.parametrize("n", [1, 2, 3])
def test_gl11_all_ranks(n):
    rep = verify_gl11(gl11_fields(build_free(n)), n)
    assert len(rep.checks) == 7
    _passes(rep)


# 2. the N=2 superconformal relations at c = n
@pytest.mark.parametrize("n", [1, 2])
def test_n2_family(n):
    _passes(verify_n2(n2_fields(build_free(n)), n))


# 3. abstract OPEs equal realized OPEs for all generator pairs k, l <= 2
@pytest.mark.parametrize("n", [1, 2])
def test_realization_cross_check(n):
    _passes(verify_realization(n, kmax=2))


# 4. relation space: empty below n+1/2, one singular vector at n+1/2
@pytest.mark.parametrize("n", [1, 2])
def test_relation_space_gap(n):
    rl = Realization(n, kmax=max(4, n + 2))
    w = Fraction(1, 2)
    while w < n + Fraction(1, 2):
        assert relation_space(n, w, realization=rl) == []
        w += Fraction(1, 2)
    vs = relation_space(n, n + Fraction(1, 2), realization=rl)
    assert len(vs) == 1
    assert singular_check(vs[0])


# 5. the four solved rank-2 decoupling formulas and the 15-term pole row
def test_decoupling_formulas():
    rep = verify_decouple2()
    assert len(rep.checks) == 5
    _passes(rep)


# 6. invariant dimensions, first relation weights, classical relations
def test_invariant_dimension_match():
    for n in (1, 2):
        w = Fraction(1, 2)
        while w <= 3:
            assert invariant_dim(n, w) == weyl_span_dim(n, w)
            w += Fraction(1, 2)
        assert first_relation_weight(n) == n + Fraction(1, 2)
    _passes(verify_weyl())


# 7. screening kernels at symbolic level, plus the current-sector
#    tables and memberships
def test_screening_kernels():
    for n in (1, 2, 3):
        _passes(verify_kernel_theorem(n))
    for n in (1, 2):
        _passes(verify_q1(n))
    # the five memberships are rank-2 statements
    rep = verify_q2(2)
    assert len(rep.checks) >= 5
    _passes(rep)


# 8. the complete rank-2 OPE table at symbolic level
def test_w2_table_symbolic():
    rep = verify_w2_opes()
    assert len(rep.checks) == 26
    _passes(rep)


# 9. the commutant realization satisfies the same table at level k+2,
#    symbolically and at three numeric levels
def test_identification_symbolic():
    rep = identify_W2_B2()
    assert len(rep.checks) == 26
    _passes(rep)


@pytest.mark.parametrize("kval", [1, 3, -5])
def test_identification_numeric(kval):
    _passes(identify_W2_B2(kval))


# 10. all structure constants among the generators degenerate to the
#     free-field constants in the large-level limit, on both realizations
@pytest.mark.parametrize("n", [1, 2])
def test_structure_constant_limits(n):
    _passes(w_limit_check(n))
    _passes(b_limit_check(n))


# 11. the level -2 current-algebra fields satisfy the table at level -1
def test_gl22_embedding():
    rep = remark_gl22_check()
    assert len(rep.checks) == 26
    _passes(rep)


# 12. engine axioms on randomized instances (>= 500 each)
def test_engine_axioms():
    engine_props.test_skew_symmetry_randomized()
    engine_props.test_derivative_lowers_index_randomized()
    engine_props.test_derivative_leibniz_randomized()
    engine_props.test_zero_mode_derivation_randomized()
    engine_props.test_weight_additivity_randomized()
    engine_props.test_confluence_randomized()
