from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest

from flatlab.field import field_of_order
from flatlab.normlab import (
    as_exponent,
    extend,
    holder_conjugate,
    identity_suite,
    kakeya_lines,
    kakeya_lower_bound,
    kakeya_maximal,
    kakeya_ratio,
    kakeya_test_inputs,
    lp_norm,
    product_inequality_diagnostic,
    opnorm_lower,
    probe_closed_form,
    probe_function,
    probe_ratio,
    probe_ratio_direct,
    rr_star_check,
    subspace_probe_exponent,
)
from flatlab.transform import COUNTING, NORMALIZED, ContractError, GridFunction
from flatlab.varieties import flat_disk, paraboloid


def test_exponent_helpers():
    assert as_exponent("3/2") == Fraction(3, 2)
    assert as_exponent("inf") == math.inf
    assert holder_conjugate(2) == 2
    assert holder_conjugate(1) == math.inf
    assert holder_conjugate("inf") == 1
    assert holder_conjugate(Fraction(4, 3)) == 4
    with pytest.raises(ValueError):
        holder_conjugate(Fraction(1, 2))


def test_lp_norms_by_measure():
    F = field_of_order(3)
    g = GridFunction.constant(F, 2, value=2)
    assert lp_norm(g, 2) == pytest.approx(6.0)
    assert lp_norm(g, 2, NORMALIZED) == pytest.approx(2.0)
    assert lp_norm(g, "inf") == pytest.approx(2.0)
    with pytest.raises(ValueError):
        lp_norm(g, Fraction(1, 2))


@pytest.mark.parametrize("backend", ["exact", "float"])
def test_identity_suite_small(backend):
    rep = identity_suite(field_of_order(3), 2, trials=10, backend=backend, seed=5)
    assert rep.passed, rep.summary()


def test_rr_star_on_paraboloid_too():
    F = field_of_order(5)
    rng = np.random.default_rng(0)
    g = GridFunction.from_array(F, 2, rng.integers(-2, 3, size=(5, 5)), backend="exact")
    assert rr_star_check(g, paraboloid(F, 2)).passed


def test_constant_extends_to_sigma_check():
    F = field_of_order(5)
    f = probe_function("constant", F, 2)
    ext = extend(f)
    assert ext.measure == COUNTING
    assert ext.values.value((0, 0, 0, 0)).to_rational() == 1


@pytest.mark.parametrize("q", [3, 5, 7])
def test_opnorm_lower_is_monotone_and_certified(q):
    est = opnorm_lower(flat_disk(field_of_order(q), 2), 6, restarts=4, iters=200, seed=1)
    assert est.best >= 1 - 1e-9
    assert est.monotone
    assert all(b >= a - 1e-12 * abs(a) for a, b in zip(est.trace, est.trace[1:]))
    assert est.reevaluate() == pytest.approx(est.best, rel=1e-9)


def test_opnorm_lower_is_seed_deterministic():
    V = flat_disk(field_of_order(5), 2)
    a = opnorm_lower(V, 6, restarts=3, iters=50, seed=7)
    b = opnorm_lower(V, 6, restarts=3, iters=50, seed=7)
    assert a.best == b.best and a.trace == b.trace


@pytest.mark.parametrize("probe", ["constant", "subspace_H", "delta"])
@pytest.mark.parametrize("q,d", [(3, 2), (5, 2), (3, 3)])
def test_probe_closed_forms(probe, q, d):
    F = field_of_order(q)
    for p, r in [(Fraction(3, 2), 4), (2, 6), (3, "inf")]:
        fast = probe_ratio(probe, p, r, F, d)
        assert fast == pytest.approx(probe_closed_form(probe, p, r, q, d), rel=1e-12)
        assert fast == pytest.approx(probe_ratio_direct(probe, p, r, F, d), rel=1e-12)


def test_sharp_pair_exponent_vanishes():
    for d in range(2, 8):
        n = 2 * d
        assert subspace_probe_exponent(2, Fraction(2 * n + 4, n - 2), d) == 0


@pytest.mark.parametrize("q,d", [(3, 2), (5, 2), (3, 3)])
def test_kakeya_exact_examples(q, d):
    F = field_of_order(q)
    inputs = kakeya_test_inputs(F, d)
    dirs = q ** (d - 1)
    assert np.allclose(kakeya_maximal(inputs["point_mass"]).values, 1)
    assert np.allclose(kakeya_maximal(inputs["constant"]).values, q)
    star = kakeya_maximal(inputs["single_line"]).values.real.ravel()
    assert sorted(star) == [1.0] * (dirs - 1) + [float(q)]
    assert star[1] == q


def test_kakeya_lines_partition_space():
    F = field_of_order(3)
    lines = kakeya_lines(F, 3)
    for v in range(lines.shape[0]):
        assert sorted(lines[v].ravel()) == list(range(27))


def test_kakeya_ratio_bounds_and_errors():
    F = field_of_order(5)
    best, name = kakeya_lower_bound(F, 2, 2, 2)
    assert 1.0 <= best <= 2.0 and name
    with pytest.raises(ValueError):
        kakeya_ratio(GridFunction.zeros(F, 2), 2, 2)
    with pytest.raises(ContractError):
        kakeya_maximal(GridFunction.constant(F, 2, measure=NORMALIZED))


def test_product_inequality_diagnostic_runs():
    rep = product_inequality_diagnostic(2, 6, 2, field_of_order(3), restarts=2, iters=30)
    assert rep.passed
    assert rep.data["flat_lower"] >= 1 - 1e-9
    with pytest.raises(ValueError):
        product_inequality_diagnostic(2, 6, Fraction(3, 2), field_of_order(3))
