from decimal import Decimal
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cantorlab.errors import DomainError
from cantorlab.numeric import (
    Digit,
    Interval,
    IntervalSet,
    as_rational,
    eval_word_interval,
    eval_word_origin,
    interval_set_algebra,
    rat,
    word,
    word_str,
    words,
)

from strategies import digit_words, lambdas, rationals

F = Fraction


def closed(a, b):
    return IntervalSet([Interval.closed(a, b)])


def opened(a, b):
    return IntervalSet([Interval.open(a, b)])


@pytest.mark.parametrize("num, den, expected", [(4, 6, F(2, 3)), (0, 5, F(0)), (3, -9, F(-1, 3))])
def test_rat_reduces(num, den, expected):
    r = rat(num, den)
    assert r == expected
    assert r.denominator > 0


def test_rat_zero_denominator():
    with pytest.raises(ZeroDivisionError):
        rat(1, 0)


def test_as_rational_inputs():
    assert as_rational("2/3") == F(2, 3)
    assert as_rational(" 5 ") == 5
    assert as_rational(Decimal("0.25")) == F(1, 4)
    for bad in (0.5, True, "1/0", "a/b", "0.5", None):
        with pytest.raises(DomainError):
            as_rational(bad)


def test_digit_values():
    lam = F(2, 3)
    assert [d.value(lam) for d in Digit] == [0, lam, 2]


def test_words_parse_and_print():
    assert word("ZTL") == (Digit.Z, Digit.T, Digit.L)
    assert word("") == ()
    assert word_str(()) == "ε"
    assert word_str(word("lz")) == "LZ"
    with pytest.raises(DomainError):
        word("ZQ")
    assert [word_str(w) for w in words(1)] == ["Z", "L", "T"]


@pytest.mark.parametrize("w, lam, expected", [
    ("", F(2, 3), F(0)),
    ("ZT", F(2, 3), F(2, 9)),
    ("LZ", F(2, 3), F(2, 9)),
])
def test_eval_word_origin(w, lam, expected):
    assert eval_word_origin(word(w), lam) == expected


@pytest.mark.parametrize("w, lam, lo, hi", [
    ("", F(1, 2), 0, 1),
    ("L", F(2, 3), F(2, 9), F(5, 9)),
    ("T", F(1, 2), F(2, 3), 1),
])
def test_eval_word_interval(w, lam, lo, hi):
    assert eval_word_interval(word(w), lam) == Interval.closed(lo, hi)


def test_algebra_examples():
    assert interval_set_algebra(closed(0, F(1, 3)), closed(F(1, 3), F(2, 3)), "union") == closed(0, F(2, 3))
    assert not interval_set_algebra(opened(F(5, 9), F(2, 3)), closed(0, F(5, 9)), "intersect")
    diff = interval_set_algebra(closed(0, 1), opened(F(5, 9), F(2, 3)), "difference")
    assert diff == IntervalSet([Interval.closed(0, F(5, 9)), Interval.closed(F(2, 3), 1)])
    assert str(diff) == "[0, 5/9] ∪ [2/3, 1]"
    with pytest.raises(DomainError):
        interval_set_algebra(diff, diff, "xor")


def test_endpoint_discipline():
    # open against open at a shared endpoint stays apart; closed touching closed merges
    a = IntervalSet([Interval.open(0, 1), Interval.open(1, 2)])
    assert len(a) == 2 and 1 not in a
    b = IntervalSet([Interval.open(0, 1), Interval.closed(1, 2)])
    assert len(b) == 1 and 1 in b
    point = IntervalSet([Interval.closed(F(1, 2), F(1, 2))])
    assert F(1, 2) in point and point.measure() == 0
    assert not (closed(0, 1) - closed(0, 1))
    assert str(IntervalSet()) == "∅"


def test_interval_validation():
    with pytest.raises((DomainError, ValueError)):
        Interval.closed(1, 0)
    with pytest.raises((DomainError, ValueError)):
        Interval.open(1, 1)


@given(digit_words(), digit_words(), lambdas())
def test_origin_composition_law(u, v, lam):
    assert eval_word_origin(u + v, lam) == eval_word_origin(u, lam) + F(1, 3 ** len(u)) * eval_word_origin(v, lam)


@given(digit_words(), lambdas())
def test_basic_interval_shape(w, lam):
    iv = eval_word_interval(w, lam)
    assert iv.width == F(1, 3 ** len(w))
    assert iv.lo == eval_word_origin(w, lam)


@st.composite
def interval_sets(draw):
    parts = []
    for _ in range(draw(st.integers(0, 4))):
        a, b = sorted((draw(rationals(0, 1, 12)), draw(rationals(0, 1, 12))))
        if a == b:
            parts.append(Interval.closed(a, a))
        else:
            parts.append(Interval(a, b, draw(st.booleans()), draw(st.booleans())))
    return IntervalSet(parts)


PROBES = sorted({F(k, 144) for k in range(-2, 147)} | {F(k, 144) + F(1, 10 ** 6) for k in range(144)})


def _points(s):
    return {x for x in PROBES if x in s}


@settings(max_examples=150)
@given(interval_sets(), interval_sets(), interval_sets())
def test_algebra_matches_pointwise(a, b, c):
    assert _points(a | b) == _points(a) | _points(b)
    assert _points(a & b) == _points(a) & _points(b)
    assert _points(a - b) == _points(a) - _points(b)
    assert (a | b) | c == a | (b | c)
    assert (a & b) & c == a & (b & c)
    assert a | b == b | a and a & b == b & a
    assert a.issubset((a - b) | b)
    if b.issubset(a):
        assert (a - b) | b == a


@given(interval_sets())
def test_canonical_form_is_unique(a):
    # rebuilding from the parts, in any order, gives a structurally equal set
    assert IntervalSet(reversed(a.parts)) == a
    assert IntervalSet(list(a.parts) + list(a.parts)) == a
    parts = a.parts
    for x, y in zip(parts, parts[1:]):
        assert x.hi <= y.lo
