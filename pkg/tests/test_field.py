from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from flatlab.field import FieldError, field_of_order, is_irreducible, make_field, parse_modulus

ORDERS = [3, 5, 7, 9, 11, 13, 25, 27, 49]


@pytest.mark.parametrize("q", ORDERS)
def test_tables_form_a_field(q):
    F = field_of_order(q)
    idx = np.arange(q)
    assert np.array_equal(F.add[0], idx)
    assert np.array_equal(F.mul[1], idx)
    assert np.array_equal(F.add, F.add.T)
    assert np.array_equal(F.mul, F.mul.T)
    # every nonzero row of the multiplication table is a permutation
    for a in range(1, q):
        assert sorted(F.mul[a]) == list(range(q))
    # additive rows are permutations too
    for a in range(q):
        assert sorted(F.add[a]) == list(range(q))


@pytest.mark.parametrize("q", [3, 9, 25])
def test_distributive_exhaustive(q):
    F = field_of_order(q)
    a, b, c = np.meshgrid(np.arange(q), np.arange(q), np.arange(q), indexing="ij")
    left = F.mul[a, F.add[b, c]]
    right = F.add[F.mul[a, b], F.mul[a, c]]
    assert np.array_equal(left, right)


@pytest.mark.parametrize("q", ORDERS)
def test_trace_is_additive_and_onto(q):
    F = field_of_order(q)
    tr = F.trace_table
    for a, b in itertools.product(range(q), repeat=2):
        assert tr[F.add[a, b]] == (tr[a] + tr[b]) % F.p
    counts = np.bincount(tr, minlength=F.p)
    assert np.all(counts == q // F.p)


@pytest.mark.parametrize("q", ORDERS)
def test_eta_is_multiplicative(q):
    F = field_of_order(q)
    els = F.elements()
    for a in els[1:]:
        for b in els[1:]:
            assert (a * b).eta() == a.eta() * b.eta()
    assert sum(e.eta() for e in els[1:]) == 0
    with pytest.raises(FieldError):
        els[0].eta()


def test_eta_minus_one_matches_q_mod_4():
    for q in ORDERS:
        F = field_of_order(q)
        assert F.eta_minus_one() == (1 if q % 4 == 1 else -1)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(ORDERS), st.data())
def test_element_arithmetic(q, data):
    F = field_of_order(q)
    a = F.element(data.draw(st.integers(0, q - 1)))
    b = F.element(data.draw(st.integers(1, q - 1)))
    assert (a / b) * b == a
    assert a - a == F.zero
    assert b * b.inverse() == F.one
    assert b ** (q - 1) == F.one
    assert -(-a) == a


def test_rejects_bad_orders_and_moduli():
    for q in (1, 2, 4, 6, 8, 15, 16):
        with pytest.raises(FieldError):
            field_of_order(q)
    with pytest.raises(FieldError):
        make_field(3, 2, modulus=(0, 0, 1))  # t^2 is reducible
    assert not is_irreducible((1, 0, 1), 5)  # t^2+1 splits mod 5
    assert is_irreducible((1, 0, 1), 7)


def test_parse_modulus_and_custom_tower():
    assert parse_modulus("1,0,1") == (1, 0, 1)
    F = make_field(3, 2, modulus=parse_modulus("1,0,1"))
    G = make_field(3, 2, modulus=parse_modulus("2,2,1"))
    assert F.q == G.q == 9
    # same field up to isomorphism: identical square counts and -1 behaviour
    assert F.eta_minus_one() == G.eta_minus_one()
    with pytest.raises(FieldError):
        parse_modulus("1,x,1")
