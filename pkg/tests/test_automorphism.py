import pytest
from hypothesis import given, strategies as st

from cubedistort.automorphism import closed_prodA, linear_form_parts, phi, verify_linear_form
from cubedistort.errors import InvalidParam, SizeLimit
from cubedistort.freegroup import Word, intern, reduce


def A(i):
    return intern(f"A{i}")


def B(j):
    return intern(f"B{j}")


def test_images_m2():
    f = phi(2, 2)
    assert str(f.images[A(1)]) == "A1"
    assert str(f.images[A(2)]) == "A1 A2 A1^-1"
    assert str(f.images[B(1)]) == "A1 A2 B1"
    assert str(f.images[B(2)]) == "A1 A2 B1 B2 A1^-1"


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_closed_forms(m):
    f = phi(m, m)
    for n in range(11):
        for k in range(1, m + 1):
            assert f.apply_iter(A(k), n) == closed_prodA(m, k, n)
        expect = reduce([A(r) for r in range(1, m + 1) for _ in range(n)] + [B(1)])
        assert f.apply_iter(B(1), n) == expect
        assert f.apply_iter_stepwise(Word((B(1),)), n) == expect


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_linear_form(m):
    for k in range(1, m + 1):
        for n in range(6):
            assert verify_linear_form(m, k, n)
    u, w = linear_form_parts(2, 2, 3)
    assert u is not None and len(w) > len(u)


@given(st.lists(st.sampled_from([1, -1, 2, -2, 3, -3]), max_size=12), st.integers(0, 4))
def test_power_is_iterate(letters, n):
    gens = [A(1), A(2), B(1)]
    w = reduce((gens[abs(x) - 1] if x > 0 else -gens[abs(x) - 1]) for x in letters)
    f = phi(2, 1)
    assert f.apply_iter(w, n) == f.apply_iter_stepwise(w, n)
    # phi is invertible: the image basis is a free basis
    from cubedistort.stallings import check_injective
    assert check_injective([f.apply_iter(g, n) for g in gens])


def test_growth_rates():
    f22, f21 = phi(2, 2), phi(2, 1)
    q2 = [f22.growth(n) / n ** 2 for n in range(4, 41)]
    q1 = [f21.growth(n) / n for n in range(4, 41)]
    assert 0.5 <= min(q2) and max(q2) <= 2.0
    assert 1.0 <= min(q1) and max(q1) <= 4.0


def test_errors():
    with pytest.raises(InvalidParam):
        phi(2, 3)
    with pytest.raises(InvalidParam):
        closed_prodA(2, 1, -1)
    with pytest.raises(SizeLimit):
        phi(3, 3, cap=50).growth(20)
    with pytest.raises(InvalidParam):
        phi(2, 2).power_images(-1)
