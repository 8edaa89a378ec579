from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from flatlab.cyclo import CycloArray
from flatlab.field import field_of_order
from flatlab.grid import grid_shape
from flatlab.transform import (
    COUNTING,
    NORMALIZED,
    SURFACE,
    ContractError,
    GridFunction,
    convolve_counting,
    convolve_normalized,
    fourier_forward,
    inner_product,
    inverse_vs_measure,
)
from flatlab.varieties import flat_disk


def random_exact(F, n, seed):
    rng = np.random.default_rng(seed)
    raw = rng.integers(-2, 3, size=grid_shape(F, n) + (F.p,))
    return GridFunction(F, n, CycloArray(F.p, raw))


@pytest.mark.parametrize("q,n", [(3, 2), (5, 2), (9, 2), (3, 4)])
def test_fast_matches_naive_exactly(q, n):
    F = field_of_order(q)
    g = random_exact(F, n, q + n)
    fast = fourier_forward(g)
    slow = fourier_forward(g, naive=True)
    assert np.all(fast.values.equal(slow.values))
    f = fast.replace(measure=NORMALIZED)
    assert np.all(inverse_vs_measure(f).values.equal(inverse_vs_measure(f, naive=True).values))


@pytest.mark.parametrize("q", [3, 7, 9])
def test_inversion_and_plancherel_exact(q):
    F = field_of_order(q)
    g = random_exact(F, 2, 11)
    hat = fourier_forward(g)
    assert np.all(inverse_vs_measure(hat).values.equal(g.values))
    assert inner_product(hat, hat) == inner_product(g, g)


def test_delta_transforms_to_constant_and_back():
    F = field_of_order(5)
    g = GridFunction.delta(F, (0, 0), backend="exact")
    hat = fourier_forward(g)
    assert np.all(hat.values.equal(GridFunction.constant(F, 2, backend="exact").values))
    const = GridFunction.constant(F, 2, measure=NORMALIZED, backend="exact")
    back = inverse_vs_measure(const)
    assert np.all(back.values.equal(g.values))


@pytest.mark.parametrize("backend", ["exact", "float"])
def test_convolution_theorem(backend):
    F = field_of_order(9)
    a = random_exact(F, 2, 1)
    b = random_exact(F, 2, 2)
    if backend == "float":
        a, b = a.as_float(), b.as_float()
    lhs = fourier_forward(convolve_counting(a, b))
    ha, hb = fourier_forward(a), fourier_forward(b)
    if backend == "exact":
        assert np.all(lhs.values.equal(ha.values * hb.values))
    else:
        assert np.allclose(lhs.values, ha.values * hb.values, rtol=1e-10, atol=1e-9)


def test_normalized_convolution_of_constants():
    F = field_of_order(3)
    one = GridFunction.constant(F, 2, measure=NORMALIZED, backend="exact")
    out = convolve_normalized(one, one)
    assert set(out.values.to_rationals().ravel()) == {Fraction(1)}


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([3, 5, 7]), st.integers(0, 10**6))
def test_float_and_exact_backends_agree(q, seed):
    F = field_of_order(q)
    g = random_exact(F, 2, seed)
    exact = fourier_forward(g).values.to_complex()
    flt = fourier_forward(g.as_float()).values
    assert np.allclose(exact, flt, atol=1e-9)


def test_surface_functions_vanish_off_variety():
    F = field_of_order(3)
    V = flat_disk(F, 2)
    f = GridFunction.constant(F, 4, measure=SURFACE, variety=V)
    assert np.count_nonzero(f.values) == V.size
    sigma_check = inverse_vs_measure(f)
    assert sigma_check.measure == COUNTING
    assert abs(sigma_check.values[(0,) * 4] - 1) < 1e-12


def test_contract_errors():
    F = field_of_order(3)
    g = GridFunction.constant(F, 2)
    with pytest.raises(ContractError):
        inverse_vs_measure(g)
    with pytest.raises(ContractError):
        fourier_forward(g.replace(measure=NORMALIZED))
    with pytest.raises(ContractError):
        GridFunction(F, 2, np.zeros((3, 4)))
    with pytest.raises(ContractError):
        GridFunction.constant(F, 4, measure=SURFACE)
    with pytest.raises(ContractError):
        convolve_counting(g, GridFunction.constant(field_of_order(5), 2))


def test_json_roundtrip():
    F = field_of_order(5)
    g = random_exact(F, 2, 4)
    back = GridFunction.from_json(g.to_json())
    assert back.equals(g)
