import random

from cubedistort.freegroup import Word, intern
from cubedistort.stallings import build_subgroup, check_injective, fold_naive, member
from oracles import X, Y, brute_membership_mismatches, random_set


def test_examples():
    g = build_subgroup([Word((X, X)), Word((X, Y, -X))])
    assert g.rank == 2
    assert member(g, Word((X, Y, Y, -X)))
    assert member(g, Word((-X, -X)))
    assert not member(g, Word((X,)))
    assert not member(g, Word((Y,)))
    # <x, x^2> folds down to <x>
    h = build_subgroup([Word((X,)), Word((X, X))])
    assert h.rank == 1 and len(h.vertices()) == 1
    assert h.is_folded()


def test_trivial_subgroup():
    g = build_subgroup([Word((X, -X))])
    assert g.rank == 0
    assert member(g, Word())
    assert not member(g, Word((X,)))


def test_confluence():
    rng = random.Random(7)
    for _ in range(50):
        words = random_set(rng, rng.randint(1, 4))
        ref = build_subgroup(words).canonical()
        for k in range(10):
            order = words[:]
            rng.shuffle(order)
            assert build_subgroup(order).canonical() == ref
            assert fold_naive(order, random.Random(k)) == ref


def test_membership_against_brute_force():
    assert brute_membership_mismatches(random.Random(11)) == []


def test_injective_P1_blocks(P1):
    t1 = intern("t1")
    images = list(P1.rules[t1].values())
    v = check_injective(images)
    assert v and v.rank == 9


def test_injective_Q2_blocks(Q2):
    images = list(Q2.extra["loop_rules"]["A1"].values())
    v = check_injective(images)
    assert v and v.rank == 72


def test_not_injective():
    v = check_injective([Word((X,)), Word((X, X))])
    assert not v and v.rank == 1
    assert not check_injective([Word((X,))], r=2)


def test_dot():
    g = build_subgroup([Word((X, Y))])
    dot = g.to_dot()
    assert dot.startswith("digraph") and "x" in dot
