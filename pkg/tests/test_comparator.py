import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dsgame.arith import LassoSeq, UnsupportedDiscountError, dsum_finite, dsum_lasso, to_threshold_digits
from dsgame.comparator import (
    BAD,
    VERYGOOD,
    AlphabetError,
    Kind,
    PrefixClass,
    Relation,
    bounds,
    build,
    build_leq,
    classify_prefix,
    dump,
    membership_lasso,
    size_bound,
    state_count,
)


def test_bounds_for_zero_threshold():
    t = to_threshold_digits(0, 2)
    assert bounds(1, 2, t, 0) == (1, -1)
    t = to_threshold_digits(F(1, 3), 2)
    U, L = bounds(2, 2, t, 0)
    assert U - L == 4


def test_smallest_comparator():
    c = build(1, 2, 0, Relation.LEQ)
    assert state_count(c) == 4
    assert c.kind is Kind.SAFETY
    assert [c.state_name(s) for s in range(4)] == ["BAD", "VERYGOOD", "(0,0)", "(1,0)"]
    # from gap 0: -1 is very good, 0 stays, +1 raises the gap
    assert c.trans[c.init] == (VERYGOOD, c.init, 3)
    assert c.trans[3] == (3, BAD, BAD)


def test_build_rejects_rational_discount():
    with pytest.raises(UnsupportedDiscountError):
        build(1, F(3, 2), 0, Relation.LEQ)


def test_alphabet_checked():
    c = build(1, 2, 0, Relation.LEQ)
    with pytest.raises(AlphabetError):
        c.step(c.init, 2)


def test_strict_relations_are_cosafety():
    for rel in Relation:
        c = build(2, 2, F(1, 3), rel)
        assert c.kind is (Kind.COSAFETY if rel.is_strict else Kind.SAFETY)
        assert c.is_sink(BAD) and c.is_sink(VERYGOOD)
        for s in (BAD, VERYGOOD):
            assert set(c.trans[s]) == {s}


def test_classify_prefix_examples():
    t = to_threshold_digits(0, 2)
    assert classify_prefix(1, 2, t, []) is PrefixClass.UNDETERMINED
    assert classify_prefix(1, 2, t, [1, 1]) is PrefixClass.BAD_PREFIX
    assert classify_prefix(1, 2, t, [-1]) is PrefixClass.VERY_GOOD_PREFIX
    assert classify_prefix(1, 2, t, [0, 0, 0]) is PrefixClass.UNDETERMINED


def _extremes(word, mu, d):
    """Smallest and largest DSum over all extensions of ``word``."""
    lo = dsum_lasso(LassoSeq(word, (-mu,)), d)
    hi = dsum_lasso(LassoSeq(word, (mu,)), d)
    return lo, hi


@settings(max_examples=400)
@given(
    st.integers(1, 3),
    st.sampled_from([2, 3]),
    st.sampled_from([F(0), F(1, 3), F(-1, 2), F(5, 4)]),
    st.data(),
)
def test_prefix_classes_against_extensions(mu, d, v, data):
    word = data.draw(st.lists(st.integers(-mu, mu), min_size=1, max_size=8))
    t = to_threshold_digits(v, d)
    cls = classify_prefix(mu, d, t, word)
    lo, hi = _extremes(word, mu, d)
    if cls is PrefixClass.BAD_PREFIX:
        assert lo > v
    elif cls is PrefixClass.VERY_GOOD_PREFIX:
        assert hi <= v
    # the automaton agrees with the direct classification
    c = build_leq(mu, d, t)
    s = c.run(word)
    assert (s == BAD) == (cls is PrefixClass.BAD_PREFIX)
    assert (s == VERYGOOD) == (cls is PrefixClass.VERY_GOOD_PREFIX)


@settings(max_examples=300)
@given(
    st.integers(1, 4),
    st.sampled_from([2, 3]),
    st.sampled_from([F(0), F(1, 3), F(-1, 2), F(5, 4), F(-7, 3)]),
    st.sampled_from(list(Relation)),
    st.data(),
)
def test_membership_matches_exact_dsum(mu, d, v, rel, data):
    letters = st.integers(-mu, mu)
    head = data.draw(st.lists(letters, max_size=6))
    loop = data.draw(st.lists(letters, min_size=1, max_size=4))
    c = build(mu, d, v, rel)
    lasso = LassoSeq(head, loop)
    assert membership_lasso(c, lasso) == rel.holds(dsum_lasso(lasso, d), v)


def test_membership_edge_cases():
    c = build(1, 2, 2, Relation.LEQ)
    assert membership_lasso(c, LassoSeq((), (1,)))  # exactly 2
    assert not membership_lasso(build(1, 2, 2, Relation.LT), LassoSeq((), (1,)))
    assert membership_lasso(build(1, 2, -2, Relation.GEQ), ((), (-1,)))


def test_size_bound_holds():
    rng = random.Random(0)
    for _ in range(200):
        mu, d = rng.randint(1, 6), rng.choice([2, 3, 4])
        v = F(rng.randint(-50, 50), rng.randint(1, 40))
        for rel in Relation:
            c = build(mu, d, v, rel)
            assert state_count(c) <= size_bound(c)


def test_period_length_reported():
    v = F(1, 1019)  # 2 has order 1018 mod 1019
    t = to_threshold_digits(v, 2)
    assert len(t.period) == 1018
    c = build(1, 2, v, Relation.LEQ)
    assert c.threshold.n == 1018
    assert state_count(c) <= size_bound(c)


def test_dump_format():
    text = dump(build(1, 2, 0, Relation.LEQ))
    lines = text.splitlines()
    assert lines[0] == "comparator mu=1 d=2 rel=leq v=0/1 kind=safety"
    assert "state 0 BAD accepting=0" in lines
    assert "state 2 gap=0 idx=0 accepting=1" in lines
    assert "trans 2 1 3" in lines
    assert sum(l.startswith("trans") for l in lines) == 4 * 3
