import math

import pytest
from hypothesis import given, settings, strategies as st

from cubedistort import distortion as ds
from cubedistort.errors import BadLetter, CapExceeded, InsufficientData, InvalidParam, NotInSubgroup
from cubedistort.freegroup import Word, intern, slp_expand
from cubedistort.presentations import build_hnn
from oracles import explicit_conj


def test_witness_P_lengths():
    for k in range(65):
        s = ds.witness_P(1, k)
        assert s.subgroup_len == 9 ** k
        assert s.ambient_len == 2 * k + 1
        assert s.element.positive


@pytest.mark.parametrize("k", range(6))
def test_witness_P_matches_rewriting(P1, k):
    t1, a1 = intern("t1"), intern("a1")
    amb = Word((t1,) * k + (a1,) + (-t1,) * k)
    oracle = ds.rewrite_small(P1, amb)
    assert len(oracle) == 9 ** k
    assert slp_expand(ds.witness_P(1, k, P1).element) == oracle


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(1, 2), min_size=1, max_size=4), st.integers(1, 18))
def test_conj_expand_matches_substitution(P2, ts, a):
    u = Word(intern(f"t{i}") for i in ts)
    target = intern(f"a{a}")
    slp = ds.conj_expand(P2, u, target)
    ref = explicit_conj(P2, u, target)
    assert slp.length == 9 ** len(u)
    assert slp_expand(slp) == ref
    assert ref.is_positive


def test_conj_expand_errors(P1):
    with pytest.raises(BadLetter):
        ds.conj_expand(P1, Word.parse("a1"), intern("a1"))
    with pytest.raises(BadLetter):
        ds.conj_expand(P1, Word.parse("t1^-1"), intern("a1"))


def test_rewrite_small_errors(P1):
    with pytest.raises(NotInSubgroup):
        ds.rewrite_small(P1, Word.parse("t1 a1"))
    with pytest.raises(CapExceeded):
        ds.rewrite_small(P1, Word.parse("t1^7 a1 t1^-7"), cap=1000)


def test_chain_values():
    s = ds.witness_chain(1, 1, 3)
    assert s.subgroup_len == 729 and s.ambient_len == 7
    s = ds.witness_chain(2, 1, 1)
    assert s.subgroup_len == 9 ** 9
    assert s.ambient_len == 7
    assert ds.witness_chain(2, 1, 2).subgroup_len == 9 ** 81
    top = ds.witness_chain(3, 1, 1).subgroup_len
    assert isinstance(top, ds.Tower) and str(top) == "9^{387420489}"
    assert top.height == 1


def test_chain_depth_one_conjugator():
    from cubedistort.presentations import build_chain
    spec = build_chain(2, 1)
    first, second = spec.vertices
    level1 = ds.witness_P(1, 1, first).element
    conj = slp_expand(level1)
    # the level-1 element is W_11 spelled in the stable letters of block 2
    assert conj == first.rules[intern("t1@0")][intern("a1@0")]
    assert all(x in second.rules for x in conj)
    # explicit expansion through a prefix of that conjugator
    a1 = intern("a1@1")
    for r in range(1, 4):
        ref = explicit_conj(second, conj[:r], a1)
        assert len(ref) == 9 ** r
        assert slp_expand(ds.conj_expand(second, conj[:r], a1)) == ref
    assert ds.conj_expand(second, conj, a1).length == 9 ** 9


def test_Gmm_hand_reduction():
    s = ds.witness_Gmm(2, 1)
    assert s.subgroup_len == 8
    assert str(s.element) == "A1 A2 B1 B2 A2 B1 B2 A1^-1"
    assert s.ambient_len == 4


def test_Gmm_cubic():
    vals = [ds.witness_Gmm(2, n).subgroup_len for n in range(1, 9)]
    assert vals == [2 * n ** 3 + 2 * n ** 2 + 4 * n for n in range(1, 9)]
    assert all(b > a for a, b in zip(vals, vals[1:]))


def test_main_level_zero():
    for n in range(1, 6):
        s = ds.witness_main(0, 2, n)
        assert s.params["w1_positive"]
        assert s.subgroup_len == (2 * n + 1) ** 2
        assert s.params["tail_len"] == 2 * n


def test_main_q_step():
    s = ds.witness_main(1, 2, 1)
    assert s.params["q_factor"] == 15
    assert s.subgroup_len == 15 ** 9


def test_hnn():
    p = build_hnn(81, 729)
    s = ds.witness_hnn(81, 729, 1, p)
    assert s.subgroup_len == 9 ** 9 and s.ambient_len == 7
    # s a1 s^-1 is a 9-letter positive t-word; its 2-letter prefix gives 81
    conj = p.rules[intern("s")][intern("a1")]
    assert len(conj) == 9 and conj.is_positive
    ref = explicit_conj(p, conj[:2], intern("a1"))
    assert len(ref) == 81
    assert slp_expand(ds.conj_expand(p, conj[:2], intern("a1"))) == ref
    deep = ds.witness_hnn(81, 729, 2, p)
    assert isinstance(deep.subgroup_len, ds.Tower)
    assert deep.ambient_len == 19


def test_tower_arithmetic():
    t = ds.tower_pow(9, 10 ** 7, exact_bits=64)
    assert isinstance(t, ds.Tower)
    assert ds.tower_pow(9, 5) == 9 ** 5
    assert math.isclose(ds.iter_log(t, 1), 10 ** 7 * math.log(9))
    assert math.isclose(ds.iter_log(9 ** 100, 1), 100 * math.log(9))
    t2 = ds.Tower(9, t, 9)
    assert t2.height == 2
    assert str(t2) == "9^{9*(9^{10000000})}"


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_exceeds_iterated_exp(k):
    depth = {1: 1, 2: 2, 3: 4, 4: 5}[k]
    s = ds.witness_hnn(81, 729, depth)
    assert ds.exceeds_iterated_exp(s.subgroup_len, s.ambient_len, k)
    assert not ds.exceeds_iterated_exp(10, 100.0, 1)


def test_classify_synthetic():
    cube = [(n, n ** 3) for n in range(2, 30)]
    h, d = ds.classify_growth(cube)
    assert h == 0 and abs(d - 3) <= 0.2
    h, d = ds.classify_growth([(n, 9 ** n) for n in range(2, 30)])
    assert h == 1 and abs(d - 1) <= 0.2
    h, d = ds.classify_growth([(n, ds.tower_pow(9, 9 ** n)) for n in range(2, 12)])
    assert h == 2 and abs(d - 1) <= 0.2


def test_classify_errors():
    with pytest.raises(InsufficientData):
        ds.classify_growth([(1, 2), (2, 4)])
    with pytest.raises(InsufficientData):
        ds.classify_growth([(1, 2)] * 6)


def test_invalid_params():
    with pytest.raises(InvalidParam):
        ds.witness_P(1, -1)
    with pytest.raises(InvalidParam):
        ds.witness_main(1, 3, 1)
    with pytest.raises(InvalidParam):
        ds.witness_chain(0, 1, 1)
