"""Exact rational-function arithmetic in Q(k)."""

from fractions import Fraction

import pytest

from superw.coeff import (
    DivergesError,
    K,
    ONE,
    PoleError,
    ScalarSyntaxError,
    ZERO,
    parse_scalar,
    sc,
)


def test_constructors():
    assert sc(3).as_fraction() == 3
    assert sc(1, 2).as_fraction() == Fraction(1, 2)
    assert sc(Fraction(5, 6)).as_fraction() == Fraction(5, 6)
    assert sc(sc(7)) == sc(7)
    assert not ZERO
    assert ONE.as_fraction() == 1


def test_field_axioms():
    xs = [ZERO, ONE, K, sc(1, 2), K * K - ONE, ONE / K, (K + sc(3)) / (K - ONE)]
    for a in xs:
        assert a + ZERO == a
        assert a * ONE == a
        assert a - a == ZERO
        assert a + (-a) == ZERO
        if a:
            assert a / a == ONE
            assert a * a.inverse() == ONE
    for a in xs:
        for b in xs:
            assert a + b == b + a
            assert a * b == b * a
            for c in xs:
                assert (a + b) + c == a + (b + c)
                assert (a * b) * c == a * (b * c)
                assert a * (b + c) == a * b + a * c


def test_reduction_is_canonical():
    a = (K * K - ONE) / (K - ONE)
    b = K + ONE
    assert a == b
    assert hash(a) == hash(b)


def test_evaluate_at():
    s = (ONE + K) / (sc(4) + sc(2) * K)
    assert s.evaluate_at(2) == Fraction(3, 8)
    assert s.evaluate_at(1) == Fraction(1, 3)
    with pytest.raises(PoleError):
        (ONE / (K + sc(2))).evaluate_at(-2)


def test_limit_at_infinity():
    assert ((ONE + K) / (sc(4) + sc(2) * K)).limit_at_infinity() == Fraction(1, 2)
    assert (ONE / K).limit_at_infinity() == 0
    assert sc(7).limit_at_infinity() == 7
    with pytest.raises(DivergesError):
        (K * K / (K + ONE)).limit_at_infinity()


def test_parse_scalar():
    assert parse_scalar("(3-k^2)/k^2") == (sc(3) - K * K) / (K * K)
    assert parse_scalar("1/2") == sc(1, 2)
    assert parse_scalar("-k") == -K
    assert parse_scalar("2*k+1") == sc(2) * K + ONE
    with pytest.raises(ScalarSyntaxError):
        parse_scalar("k+")
    with pytest.raises(ScalarSyntaxError):
        parse_scalar("q")


def test_print_parse_round_trip():
    xs = [ZERO, ONE, -ONE, K, -K, sc(1, 2), (K + ONE) / (sc(2) * K), (sc(3) - K * K) / (K * K + K)]
    for a in xs:
        assert parse_scalar(str(a)) == a


def test_zero_denominator():
    with pytest.raises(ZeroDivisionError):
        ONE / ZERO
