import pytest

from cubedistort.errors import ConstraintViolated, InvalidParam
from cubedistort.freegroup import intern
from cubedistort.presentations import (
    Presentation, build_chain, build_G, build_hnn, build_main_amalgam, build_P, build_Q,
    chain_block_sizes, check_hnn_params, q_loop_words,
)
from cubedistort.wise import sigma


@pytest.mark.parametrize("n", [1, 2, 3])
def test_P_counts(n):
    p = build_P(n)
    p.validate()
    assert len(p.generators) == 10 * n
    assert len(p.relators) == 9 * n * n
    assert all(len(r) == 12 for r in p.relators)
    assert sum(len(w) for w in p.blocks["a"]) == 81 * n * n
    assert p.no_repeat_verdict() is None


def test_P1_first_relator(P1):
    # t1 a1 t1^-1 = W_11 = a1 a1 a2 a1 a3 a1 a4 a1 a5
    assert str(P1.relators[0]) == "t1 a1 t1^-1 a5^-1 a1^-1 a4^-1 a1^-1 a3^-1 a1^-1 a2^-1 a1^-1 a1^-1"
    assert str(P1.rules[intern("t1")][intern("a1")]) == "a1 a1 a2 a1 a3 a1 a4 a1 a5"
    assert P1.blocks["a"][0] == sigma(9)[:9]


def test_text_roundtrip(P1, Q2):
    for p in (P1, Q2):
        q = Presentation.from_text(p.to_text())
        assert q.generators == p.generators
        assert q.relators == p.relators
        assert q.tags == p.tags
        assert q.marked == p.marked


def test_Q_counts(Q2):
    Q2.validate()
    assert Q2.params["p"] == 72
    assert len(Q2.relators) == 288
    assert len(build_Q(2, primed=True).relators) == 216
    assert all(len(w) == 15 for w in Q2.blocks["c"])
    assert Q2.no_repeat_verdict() is None
    assert all(len(r) == 20 for r in Q2.relators)


def test_Q_verbatim_reading():
    q = build_Q(2, fourth_family="verbatim")
    q.validate()
    lens = {len(r) for r in q.relators}
    assert 20 in lens and max(lens) > 20
    with pytest.raises(InvalidParam):
        build_Q(2, fourth_family="other")
    with pytest.raises(InvalidParam):
        build_Q(3)


def test_q_loops_are_a_basis():
    from cubedistort.stallings import check_injective
    for m in (2, 4):
        for primed in (False, True):
            loops = list(q_loop_words(m, primed).values())
            assert len(loops) == (2 * m - 1 if primed else 2 * m)
            assert check_injective(loops)


def test_G_examples():
    s, fbc = build_G(1, 1)
    assert [str(r) for r in s.relators] == ["s1 s2 s1^-1 s2^-1", "s3^-1 s1 s3 s2^-1"]
    s.validate()
    fbc.validate()
    s22, fbc22 = build_G(2, 2)
    assert len(s22.generators) == 5 and len(s22.relators) == 4
    assert len(fbc22.generators) == 5
    with pytest.raises(InvalidParam):
        build_G(2, 3)


def test_G_change_of_basis_is_free_basis():
    from cubedistort.stallings import check_injective
    s, _ = build_G(2, 2)
    change = s.extra["change_of_basis"]
    assert check_injective(list(change.values()))


def test_chain():
    assert chain_block_sizes(3, 1) == [1, 9, 81]
    assert chain_block_sizes(2, 2) == [8, 72]
    spec = build_chain(2, 1)
    assert len(spec.vertices) == 2 and len(spec.edges) == 1
    assert spec.edges[0].rank == 9
    # merged names make the edge relators trivial
    pres = spec.presentation()
    assert len(pres.relators) == 9 + 729
    assert intern("a1@0") in pres.generators
    with pytest.raises(InvalidParam):
        build_chain(2, 1, sizes=[1, 10])


def test_main_amalgam():
    spec = build_main_amalgam(1, 2)
    assert len(spec.vertices) == 2
    assert spec.edges[0].rank == 4
    spec3 = build_main_amalgam(2, 2, primed=True)
    assert len(spec3.vertices) == 3
    assert spec3.edges[0].rank == 3
    assert spec3.edges[1].rank == 72
    assert spec3.vertices[2].params["n"] == 72


def test_hnn_constraints():
    check_hnn_params(81, 729)
    with pytest.raises(ConstraintViolated) as e:
        check_hnn_params(2, 3)
    assert e.value.inequality == "9mn <= m^2"
    with pytest.raises(ConstraintViolated) as e:
        check_hnn_params(81, 730)
    assert e.value.inequality == "9m <= n^2"
    with pytest.raises(ConstraintViolated) as e:
        build_hnn(82, 729)
    assert e.value.inequality == "9mn <= m^2"


@pytest.mark.parametrize("m,primed", [(2, False), (2, True), (4, False), (4, True)])
def test_q_loops_match_change_of_basis(m, primed):
    from cubedistort.complexes import s_image_pairs
    from cubedistort.freegroup import Word, substitute

    images = {a: Word((b if s > 0 else -b,)) for a, b, s in s_image_pairs(m, primed)}
    s_pres, _ = build_G(m, m - 1 if primed else m)
    change = s_pres.extra["change_of_basis"]
    for name, loop in q_loop_words(m, primed).items():
        assert substitute(loop, images) == change[intern(name)]
