import pytest
from hypothesis import given, settings, strategies as st

from skewalg.errors import BadParameters, IndexHypothesisViolated, ZeroElement
from skewalg.tower import element_from_json, make_tower, tower_from_json

T = make_tower(3, 1, 3, 2, 6)


coeffs = st.lists(st.integers(0, T.mod - 1), min_size=T.f_M, max_size=T.f_M)


def test_bad_parameters():
    with pytest.raises(BadParameters):
        make_tower(2, 1, 1, 1, 4)
    with pytest.raises(BadParameters):
        make_tower(5, 1, 3, 1, 4)
    with pytest.raises(IndexHypothesisViolated):
        make_tower(5, 1, 1, 3, 4)


def test_degrees():
    assert (T.f_K, T.f_M, T.q) == (3, 6, 27)


@settings(max_examples=30, deadline=None)
@given(coeffs, coeffs, coeffs)
def test_ring_axioms(a, b, c):
    x, y, z = T.element(a), T.element(b), T.element(c)
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x * y == y * x


@settings(max_examples=30, deadline=None)
@given(coeffs)
def test_inverse(a):
    x = T.element(a)
    if x.is_zero():
        with pytest.raises(ZeroElement):
            x.val()
        return
    assert x * x.inv() == T.one()


@settings(max_examples=20, deadline=None)
@given(coeffs, coeffs)
def test_frobenius_is_ring_automorphism_of_order_f_M(a, b):
    x, y = T.element(a), T.element(b)
    assert (x * y).frobenius(1) == x.frobenius(1) * y.frobenius(1)
    assert x.frobenius(T.f_M) == x


def test_teichmuller_and_omega():
    w = T.omega
    order = T.p ** T.f_M - 1
    assert w ** order == T.one()
    for ell in (2, 7, 13):
        assert w ** (order // ell) != T.one()
    assert w.frobenius(1) == w ** T.p


def test_subfields():
    w = T.omega
    norm_k = w
    for j in range(1, T.f_M // T.f_k):
        norm_k = norm_k * w.frobenius(j * T.f_k)
    assert T.in_k(norm_k)
    assert not T.in_K(w)


def test_json_round_trip():
    assert tower_from_json(T.to_json()) == T
    x = T.element([1, 2, 3, 4, 5, 6], 2)
    assert element_from_json(T, x.to_json()) == x
