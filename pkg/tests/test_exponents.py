from __future__ import annotations

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from flatlab.exponents import (
    EPS,
    EXPECTED_FLAT,
    EpsExponent,
    ExponentPair,
    check_ledger,
    conjecture_region,
    derive_ledger,
    dual,
    flat_from_paraboloid,
    interpolate,
    kakeya_derivable,
    kakeya_requirement,
    necessary_ok,
    nesting_dominates,
    parse_exponent,
    stein_tomas_rule,
)

fractions = st.fractions(min_value=-20, max_value=20, max_denominator=12)


def test_canonical_form_and_printing():
    e = EpsExponent.affine(72, 0, 20, 5)
    assert str(e) == "72/(20+5*eps)"
    assert EpsExponent.affine(4, 2, 2, 1) == EpsExponent.const(2)
    assert str(EpsExponent.affine(Fraction(1, 2), Fraction(1, 3))) == "1/2+1/3*eps"
    d = EpsExponent.variable("d")
    assert str((2 * d + 2) / (d - 1)) == "(2*d+2)/(d-1)"


@settings(max_examples=100, deadline=None)
@given(fractions, fractions, fractions, fractions)
def test_parse_roundtrip(a, b, c, dd):
    if c == 0:
        c = Fraction(1)
    e = EpsExponent.affine(a, b, c, dd)
    assert parse_exponent(str(e)) == e


@settings(max_examples=100, deadline=None)
@given(fractions, fractions, fractions, fractions, st.fractions(0, 1, max_denominator=50))
def test_arithmetic_matches_evaluation(a, b, c, dd, x):
    u = EpsExponent.affine(a, b)
    v = EpsExponent.affine(c, dd)
    assert (u + v).subs(x) == u.subs(x) + v.subs(x)
    assert (u * v).subs(x) == u.subs(x) * v.subs(x)
    if v.subs(x) != 0 and v.num:
        assert (u / v).subs(x) == u.subs(x) / v.subs(x)


def test_small_eps_ordering():
    three = EpsExponent.const(3)
    assert three + EPS > three
    assert three - EPS < three
    assert EPS > 0 and -EPS < 0
    assert (EPS * EPS).sign() == 1
    # large-d semantics for the dimension variable
    d = EpsExponent.variable("d")
    assert (d - 100).sign() == 1
    assert (2 * d + 4) / d > 2


def test_pair_from_pr_and_infinity():
    pair = ExponentPair.from_pr("inf", 4)
    assert pair.p == math.inf
    assert str(pair) == "(inf -> 4)"
    assert dual(ExponentPair.from_pr(2, 4)) == ExponentPair.from_pr(Fraction(4, 3), 2)


def test_rules_on_known_values():
    d = EpsExponent.variable("d")
    assert stein_tomas_rule(d, d - 1, d - 1) == (2 * d + 2) / (d - 1)
    n = EpsExponent.variable("n")
    assert stein_tomas_rule(n, n - 2, (n - 2) / 2) == (2 * n + 12) / (n - 2)
    assert flat_from_paraboloid(2, 4) == ExponentPair.from_pr(4, 4)
    assert kakeya_requirement(3, 4) == ExponentPair.from_pr(2, 4)
    with pytest.raises(ValueError):
        flat_from_paraboloid(3, 2)


def test_interpolation_and_nesting():
    a = ExponentPair.from_pr(2, 4)
    b = ExponentPair.from_pr(4, 8)
    mid = interpolate(a, b, Fraction(1, 2))
    assert mid.inv_p == Fraction(3, 8) and mid.inv_r == Fraction(3, 16)
    assert nesting_dominates(a, b)
    assert not nesting_dominates(b, a)
    with pytest.raises(ValueError):
        interpolate(a, b, 2)


def test_kakeya_derivability():
    assert kakeya_derivable(ExponentPair.from_pr(3, 3), 3)
    assert kakeya_derivable(ExponentPair.from_pr(1, "inf"), 3)
    assert kakeya_derivable(ExponentPair.from_pr(2, 4), 3)
    assert not kakeya_derivable(ExponentPair.from_pr(4, 4), 3)


def test_necessary_conditions_and_region():
    assert necessary_ok(ExponentPair.from_pr(2, 4), 6)
    assert not necessary_ok(ExponentPair.from_pr(2, 2), 6)
    assert conjecture_region(ExponentPair.from_pr(2, 4), 6) == "boundary"
    assert conjecture_region(ExponentPair.from_pr(4, 8), 6) == "inside"
    assert conjecture_region(ExponentPair.from_pr(2, 3), 6) == "outside"


def test_ledger_reproduces_expected_table():
    rep = check_ledger()
    assert rep.passed, rep.summary()
    rows = {e.key: e for e in derive_ledger()}
    assert set(EXPECTED_FLAT) <= set(rows)
    assert str(rows["interpolated_d3"].pair) == "(36/13 -> 72/(20+5*eps))"


@pytest.mark.parametrize("key", sorted(EXPECTED_FLAT))
def test_ledger_rows_against_floats(key):
    """Recompute each flat pair in floating point from the paraboloid exponent."""
    est = {e.key: e for e in derive_ledger()}[key]
    eps = 1e-3
    for d in est.dims[:4]:
        pair = est.at(d)
        r = float(pair.r.subs(eps)) if pair.r.var == "eps" else float(pair.r.subs(0))
        p_expected = 2 * r * (d - 1) / (r * d - r - 2)
        p = float(pair.p.subs(eps)) if pair.p.var == "eps" else float(pair.p.subs(0))
        assert p == pytest.approx(p_expected, rel=1e-12)
