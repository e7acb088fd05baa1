"""Screening charges on the half-lattice algebra: bosonization, the
kernel currents, the full rank-2 OPE table, and the large-level limits
of all structure constants."""

import pytest

from superw.coeff import K, ONE, sc
from superw.lattice import (
    bosonization_check,
    build_M,
    build_W2_basis,
    build_W_generators,
    q_alpha,
    q_beta,
    verify_kernel_theorem,
    verify_q1,
    verify_q2,
    verify_w2_opes,
    w_limit_check,
)


def test_base_algebra_pairings():
    alg = build_M(1)
    assert alg.gen("dY", 1).ope(alg.gen("dX", 1)) == {2: alg.one}
    assert alg.gen("b", 1).ope(alg.gen("c", 1)) == {1: alg.one}


def test_bosonization():
    rep = bosonization_check()
    assert rep.passed, str(rep)


@pytest.mark.parametrize("n", [1, 2])
def test_q1_table(n):
    rep = verify_q1(n)
    assert rep.checks, "empty report"
    assert rep.passed, str(rep)


@pytest.mark.parametrize("n", [1, 2])
def test_q2_memberships(n):
    rep = verify_q2(n)
    assert rep.passed, str(rep)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_kernel_theorem(n):
    rep = verify_kernel_theorem(n)
    assert rep.passed, str(rep)


def test_generators_in_joint_kernel():
    alg = build_M(2)
    fields = build_W_generators(alg)
    charges = [q_alpha(alg, 1), q_alpha(alg, 2), q_beta(alg, 1)]
    for name, v in fields.items():
        for q in charges:
            assert not q.apply(v), f"{name} not killed"


def test_w2_ope_table_symbolic():
    rep = verify_w2_opes()
    assert len(rep.checks) == 26
    assert rep.passed, str(rep)


def test_w2_central_values():
    # spot values read off the weight-2 sector at symbolic level
    f = build_W2_basis()
    assert f["G+"].nprod(f["G-"], 3).identity_part() == -(ONE - sc(3) / (K * K))
    assert f["T"].nprod(f["H"], 3).identity_part() == sc(3) / (K * K) - ONE


@pytest.mark.parametrize("n", [1, 2])
def test_structure_constant_limits(n):
    rep = w_limit_check(n)
    assert rep.checks, "empty report"
    assert rep.passed, str(rep)
