from __future__ import annotations

import cmath
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from flatlab.characters import (
    char_sum_orthogonality,
    chi,
    complete_square_exhaustive,
    gauss_sum,
    quad_sum,
    quad_sum_closed,
    verify_gauss,
)
from flatlab.cyclo import CycloArray, CycloValue
from flatlab.field import FieldError, field_of_order

PRIMES = [3, 5, 7, 11]


def small_cyclo(p):
    return st.lists(st.integers(-4, 4), min_size=p, max_size=p).map(
        lambda c: CycloValue.from_redundant(p, c))


@settings(max_examples=50, deadline=None)
@given(st.sampled_from(PRIMES), st.data())
def test_cyclo_ring_laws(p, data):
    a, b, c = (data.draw(small_cyclo(p)) for _ in range(3))
    assert (a + b) * c == a * c + b * c
    assert (a * b) * c == a * (b * c)
    assert a - a == CycloValue.zero(p)
    assert abs((a * b).to_complex() - a.to_complex() * b.to_complex()) < 1e-9


def test_cyclo_redundant_basis_collapses():
    # 1 + zeta + ... + zeta^(p-1) = 0
    for p in PRIMES:
        assert CycloValue.from_redundant(p, [1] * p).is_zero()
        z = CycloValue.zeta(p)
        assert z ** p == CycloValue.one(p)
        assert abs(z.to_complex() - cmath.exp(2j * cmath.pi / p)) < 1e-12


def test_cyclo_abs2_is_real_and_rational_detection():
    z = CycloValue.zeta(5, 2)
    assert z.abs2() == CycloValue.one(5)
    half = CycloValue.rational(7, Fraction(1, 2))
    assert half.is_rational() and half.to_rational() == Fraction(1, 2)
    assert not z.is_rational()


def test_cyclo_array_matches_scalars():
    rng = np.random.default_rng(3)
    p = 5
    raw = rng.integers(-3, 4, size=(4, 3, p))
    arr = CycloArray(p, raw)
    for i in range(4):
        for j in range(3):
            assert arr.value((i, j)) == CycloValue.from_redundant(p, raw[i, j])
    assert np.all(arr.equal(arr.copy()))
    assert np.allclose(arr.abs2().to_complex(), np.abs(arr.to_complex()) ** 2)
    ints = CycloArray.from_integers(p, np.array([1, -2, 7]), denom=2)
    assert list(ints.to_rationals()) == [Fraction(1, 2), Fraction(-1), Fraction(7, 2)]


@pytest.mark.parametrize("q", [3, 5, 7, 9, 11, 13, 25, 27, 49])
def test_gauss_square(q):
    F = field_of_order(q)
    G = gauss_sum(F)
    assert G.squared() == CycloValue.rational(F.p, F.eta_minus_one() * q)
    assert abs(abs(G.value.to_complex()) ** 2 - q) < 1e-8


@pytest.mark.parametrize("q", [3, 5, 9, 25, 27])
def test_complete_square_exhaustive(q):
    checked, failures = complete_square_exhaustive(field_of_order(q))
    assert checked == (q - 1) * q
    assert failures == []


def test_quad_sum_scalar_form_and_zero_guard():
    F = field_of_order(7)
    for a in F.elements()[1:]:
        for b in F.elements():
            assert quad_sum(a, b) == quad_sum_closed(a, b)
    with pytest.raises(FieldError):
        quad_sum(F.zero, F.one)


def test_character_orthogonality():
    F = field_of_order(9)
    assert char_sum_orthogonality(F.zero) == CycloValue.rational(3, 9)
    for a in F.elements()[1:]:
        assert char_sum_orthogonality(a).is_zero()
    a, b = F.element(4), F.element(7)
    assert chi(a + b) == chi(a) * chi(b)


def test_verify_gauss_report_passes():
    rep = verify_gauss([3, 5, 9], square_max=9)
    assert rep.passed
    assert {c.name for c in rep.checks} >= {"gauss_square"}
