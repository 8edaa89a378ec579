from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np
import pytest

from flatlab.field import field_of_order
from flatlab.varieties import (
    flat_disk,
    flat_disk_equations,
    make_variety,
    omega_class_sizes,
    omega_classify,
    omega_labels,
    paraboloid,
    subspace_H,
    surface_measure,
)


@pytest.mark.parametrize("q,d", [(3, 2), (5, 2), (9, 2), (3, 3), (5, 3)])
def test_parametrisation_matches_equations(q, d):
    F = field_of_order(q)
    V = flat_disk(F, d)
    assert np.array_equal(V.mask, flat_disk_equations(F, d))
    assert V.size == q ** (2 * d - 2)


@pytest.mark.parametrize("q,d", [(3, 2), (7, 2), (3, 3)])
def test_subspace_sits_inside_flat_disk(q, d):
    F = field_of_order(q)
    H = subspace_H(F, d)
    assert H.size == q ** (d - 1)
    assert np.all(flat_disk(F, d).mask[H.mask])


def test_paraboloid_size_and_membership():
    F = field_of_order(5)
    P = paraboloid(F, 3)
    assert P.size == 25
    for x, y in itertools.product(range(5), repeat=2):
        z = F.add[F.mul[x, x], F.mul[y, y]]
        assert P.contains((x, y, z))


def test_surface_measure_has_unit_mass():
    F = field_of_order(3)
    sm = surface_measure(flat_disk(F, 2))
    assert sm.total_mass() == 1
    assert sm.weight == Fraction(81, 9)


@pytest.mark.parametrize("q,d", [(3, 2), (5, 2), (3, 3)])
def test_omega_partition_sizes(q, d):
    F = field_of_order(q)
    labels = omega_labels(F, d)
    counts = np.bincount(labels.ravel(), minlength=6)
    sizes = omega_class_sizes(q, d)
    assert [int(c) for c in counts] == [sizes[j] for j in range(6)]
    assert sum(sizes.values()) == q ** (2 * d)


def test_omega_classify_examples():
    d = 3
    assert omega_classify((0, 0, 0, 0, 0, 0), d) == 0
    assert omega_classify((1, 0, 0, 0, 0, 0), d) == 1
    assert omega_classify((0, 0, 0, 0, 0, 2), d) == 2
    assert omega_classify((0, 0, 1, 0, 1, 0), d) == 3
    assert omega_classify((2, 0, 1, 0, 0, 0), d) == 4
    assert omega_classify((0, 0, 1, 0, 0, 1), d) == 5
    with pytest.raises(ValueError):
        omega_classify((0, 0), d)


def test_make_variety_names():
    F = field_of_order(3)
    assert make_variety("flat", F, 2) is flat_disk(F, 2)
    assert make_variety("H", F, 2) is subspace_H(F, 2)
    with pytest.raises(ValueError):
        make_variety("sphere", F, 2)
