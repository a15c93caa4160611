from __future__ import annotations

import pytest

from antiorb.cyclotomic import CycNum
from antiorb.finitefield import FqField, additive_character, field_of_order, fq_arith, get_field

FIELDS = [(3, 1), (5, 1), (7, 1), (3, 2), (5, 2)]


def test_small_examples():
    F3 = get_field(3)
    assert fq_arith(F3.elem(2), F3.elem(2), "mul") == F3.elem(1)
    F9 = get_field(3, 2)
    t = F9.elem(3)  # coefficient vector (0, 1)
    assert (t * t).index == 2
    F5 = get_field(5)
    assert fq_arith(F5.elem(2), None, "inv") == F5.elem(3)


def test_errors():
    F5 = get_field(5)
    with pytest.raises(ZeroDivisionError):
        F5.elem(0).inv()
    with pytest.raises(ValueError):
        F5.elem(1) + get_field(3).elem(1)
    with pytest.raises(ValueError):
        FqField(3, 2, (2, 0, 1))  # t^2 + 2 = (t-1)(t+1) over F_3
    with pytest.raises(ValueError):
        FqField(2, 1)


@pytest.mark.parametrize("p,k", FIELDS)
def test_field_axioms_exhaustive(p, k):
    F = get_field(p, k)
    q = F.q
    for a in range(q):
        assert F.add[a, 0] == a and F.mul[a, 1] == a
        assert F.add[a, F.neg[a]] == 0
        if a:
            assert F.mul[a, F.inv[a]] == 1
        for b in range(q):
            for c in range(0, q, max(1, q // 5)):
                assert F.mul[a, F.add[b, c]] == F.add[F.mul[a, b], F.mul[a, c]]


@pytest.mark.parametrize("p,k", FIELDS)
def test_character_is_additive(p, k):
    F = get_field(p, k)
    for x in F.elements():
        for y in F.elements():
            assert additive_character(x + y) == additive_character(x) * additive_character(y)


@pytest.mark.parametrize("p,k", FIELDS)
def test_character_orthogonality(p, k):
    F = get_field(p, k)
    for c in F.elements():
        total = sum((additive_character(c * x) for x in F.elements()), CycNum.zero(p))
        assert total == (F.q if c.index == 0 else 0)


def test_character_examples():
    F3 = get_field(3)
    assert additive_character(F3.elem(0)) == 1
    assert additive_character(F3.elem(1)) == CycNum.zeta(3)


@pytest.mark.parametrize("p,k", FIELDS)
def test_index_is_bijection(p, k):
    F = get_field(p, k)
    seen = {F.from_coeffs(F.coeffs(i)) for i in range(F.q)}
    assert seen == set(range(F.q))
    assert F.coeffs(0) == [0] * k


@pytest.mark.parametrize("q", [3, 5, 7, 9, 25])
def test_primitive_root(q):
    F = field_of_order(q)
    assert F.q == q
    assert F.mult_order(F.primitive_root) == q - 1


def test_json_descriptor():
    F = get_field(5, 2)
    assert F.to_json() == {"p": 5, "k": 2, "modulus": [2, 0, 1]}
    assert FqField.from_json(F.to_json()) == F
