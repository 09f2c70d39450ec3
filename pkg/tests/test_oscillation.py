import itertools

import pytest
from hypothesis import given, settings, strategies as st

from psilab.oscillation import (SplitTree, almost_oscillating_family, almost_oscillation_bound,
                                branch_words, difference_set, is_oscillating, meet,
                                split_oscillating)
from psilab.streams import Arithmetic, Literal, evens, omega, take


def naive_split(xs, steps):
    """Alternate picks: least unused x above the side's last pick whose gap
    beats the other side's current spread."""
    a, b = [xs[0]], [xs[1]]
    while len(a) + len(b) < steps:
        mine, other = (a, b) if len(a) == len(b) else (b, a)
        used = set(a) | set(b)
        # the spread of the other side includes its pick from this round
        spread = other[-1] - other[0]
        mine.append(next(x for x in xs if x not in used and x > mine[-1] and x - mine[-1] > spread))
    return a, b


def naive_bound(p, q):
    top = max(max(p, default=-1), max(q, default=-1)) + 1
    for n in range(top + 1):
        if is_oscillating([x for x in p if x >= n], [x for x in q if x >= n]):
            return n


def test_split_omega_golden():
    a, b = split_oscillating(omega())
    assert take(a, 6) == [0, 2, 6, 17, 46, 122]
    assert take(b, 6) == [1, 4, 11, 29, 76, 199]


def test_split_evens_golden():
    a, b = split_oscillating(evens())
    assert take(a, 3) == [0, 4, 12]
    assert take(b, 2) == [2, 8]


def test_split_matches_naive_oracle_on_omega():
    a, b = split_oscillating(omega())
    na, nb = naive_split(list(range(2000)), 14)
    assert take(a, 7) == na and take(b, 7) == nb


def test_difference_sets_of_split_are_disjoint():
    a, b = split_oscillating(omega())
    da, db = difference_set(take(a, 4)), difference_set(take(b, 4))
    assert {2, 6, 17, 4, 15, 11} == da.values
    assert {3, 10, 28, 7, 25, 18} == db.values
    assert da.values.isdisjoint(db.values)


def test_oscillation_examples():
    assert is_oscillating([0, 1], [5, 7])
    assert not is_oscillating([0, 2], [5, 7])
    # from 3 on: {10, 30} has difference 20, {5, 7, 13, 40} has 2, 6, 8, 27, 33, 35
    assert almost_oscillation_bound([0, 2, 10, 30], [5, 7, 13, 40]) == 3
    assert almost_oscillation_bound([0, 1, 2], [0, 1, 2], min_survivors=2) is None


@given(st.lists(st.integers(0, 500), max_size=12), st.integers(0, 1000))
def test_difference_set_translation_invariant(xs, c):
    assert difference_set(xs).values == difference_set([x + c for x in xs]).values


@given(st.lists(st.integers(0, 80), max_size=8), st.lists(st.integers(0, 80), max_size=8))
def test_oscillation_symmetric_and_bound_matches_oracle(p, q):
    assert is_oscillating(p, q) == is_oscillating(q, p)
    n = almost_oscillation_bound(p, q)
    assert n == naive_bound(sorted(set(p)), sorted(set(q)))
    assert almost_oscillation_bound(q, p) == n


@given(st.integers(0, 30), st.integers(1, 7))
@settings(max_examples=40)
def test_split_of_progression_oscillates_and_matches_oracle(start, step):
    x = Arithmetic(start, step)
    a, b = split_oscillating(x)
    pa, pb = take(a, 6), take(b, 6)
    assert is_oscillating(pa, pb)
    assert set(pa).isdisjoint(pb)
    assert all(v in x for v in pa + pb)
    na, nb = naive_split(take(x, 2000), 12)
    assert (pa, pb) == (na, nb)


def test_split_of_literal_runs_out():
    a, _ = split_oscillating(Literal(range(10)))
    with pytest.raises(IndexError):
        take(a, 10)


@pytest.mark.parametrize("d", range(5))
def test_tree_levels_and_nesting(d):
    tree = SplitTree(depth=d)
    assert len(tree.level(d)) == 2**d
    for s in tree.level(d):
        if s:
            parent = tree.node(s[:-1])
            assert all(x in parent for x in take(tree.node(s), 4))
    for s in tree.level(d):
        a, b = take(tree.node(s + "0"), 5), take(tree.node(s + "1"), 5)
        assert set(a).isdisjoint(b) and is_oscillating(a, b)


def test_meet_and_branch_words():
    assert meet("0110", "0101") == "01"
    assert branch_words(1) == [""]
    assert branch_words(3) == ["00", "01", "10"]
    assert len(branch_words(16)) == 16 and len(set(branch_words(16))) == 16


def test_family_members_follow_their_branch():
    tree = SplitTree()
    fam = almost_oscillating_family(4, 8, tree)
    assert [p.name for p in fam] == ["P_00", "P_01", "P_10", "P_11"]
    for p in fam:
        elems = take(p, 8)
        # P minus A_{f|n} is inside the first n picks
        for n in range(8):
            node = tree.node((p.word + "1" * n)[:n])
            assert all(x in elems[:n] for x in elems if x not in node)
    for p, q in itertools.combinations(fam, 2):
        assert almost_oscillation_bound(take(p, 8), take(q, 8), min_survivors=2) is not None
