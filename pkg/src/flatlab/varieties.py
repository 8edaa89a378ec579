"""Flat disk, paraboloid, the subspace H, surface measures and the Omega partition."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache

import numpy as np

from .field import Field
from .grid import coordinates, grid_shape, point_index

__all__ = [
    "Variety",
    "SurfaceMeasure",
    "flat_disk",
    "paraboloid",
    "subspace_H",
    "surface_measure",
    "omega_classify",
    "omega_labels",
    "omega_class_sizes",
    "flat_disk_equations",
]

KINDS = ("flat_disk", "paraboloid", "subspace_H")


@dataclass(frozen=True, eq=False)
class Variety:
    kind: str
    field: Field
    d: int
    mask: np.ndarray

    @property
    def n(self) -> int:
        return self.mask.ndim

    @cached_property
    def indices(self) -> np.ndarray:
        return np.flatnonzero(self.mask.ravel())

    @property
    def size(self) -> int:
        return int(self.indices.size)

    def __len__(self) -> int:
        return self.size

    def points(self) -> np.ndarray:
        """(size, n) array of index coordinates, in canonical order."""
        return np.stack(np.unravel_index(self.indices, self.mask.shape), axis=1)

    def contains(self, point) -> bool:
        return bool(self.mask[point_index(self.field, point)])

    def __contains__(self, point) -> bool:
        return self.contains(point)

    def same_as(self, other: Variety) -> bool:
        return (
            self.kind == other.kind
            and self.d == other.d
            and self.field == other.field
        )

    def descriptor(self) -> dict:
        return {"kind": self.kind, "d": self.d}

    def __repr__(self) -> str:
        return f"Variety({self.kind}, d={self.d}, q={self.field.q}, |V|={self.size})"


def _check_d(d: int) -> None:
    if d < 2:
        raise ValueError(f"d={d}: need d >= 2")


def _sum_of_squares(field: Field, coords) -> np.ndarray:
    acc = np.zeros((), dtype=np.int64)
    for c in coords:
        acc = field.add[acc, field.mul[c, c]]
    return acc


@lru_cache(maxsize=None)
def flat_disk(field: Field, d: int) -> Variety:
    """``{(a, a.a, b, a.b) : a, b in F_q^(d-1)}`` inside F_q^(2d), built from the parametrisation."""
    _check_d(d)
    q = field.q
    k = d - 1
    grids = np.indices((q,) * (2 * k)).reshape(2 * k, -1)
    alpha, beta = grids[:k], grids[k:]
    aa = np.zeros(alpha.shape[1], dtype=np.int64)
    ab = np.zeros(alpha.shape[1], dtype=np.int64)
    for i in range(k):
        aa = field.add[aa, field.mul[alpha[i], alpha[i]]]
        ab = field.add[ab, field.mul[alpha[i], beta[i]]]
    pts = np.concatenate([alpha, aa[None], beta, ab[None]], axis=0)
    mask = np.zeros(grid_shape(field, 2 * d), dtype=bool)
    mask[tuple(pts)] = True
    mask.setflags(write=False)
    v = Variety("flat_disk", field, d, mask)
    if v.size != q ** (2 * d - 2):
        raise RuntimeError("flat disk parametrisation is not injective")
    return v


def flat_disk_equations(field: Field, d: int) -> np.ndarray:
    """Mask of points solving x_d = sum x_i^2 and x_2d = sum x_i x_(d+i)."""
    _check_d(d)
    c = coordinates(field, 2 * d)
    k = d - 1
    sq = _sum_of_squares(field, c[:k])
    cross = np.zeros((), dtype=np.int64)
    for i in range(k):
        cross = field.add[cross, field.mul[c[i], c[d + i]]]
    return (c[d - 1] == sq) & (c[2 * d - 1] == cross)


@lru_cache(maxsize=None)
def paraboloid(field: Field, d: int) -> Variety:
    """``{x in F_q^d : x_1^2 + ... + x_(d-1)^2 = x_d}``."""
    _check_d(d)
    c = coordinates(field, d)
    mask = np.broadcast_to(c[d - 1] == _sum_of_squares(field, c[: d - 1]), grid_shape(field, d))
    mask = np.ascontiguousarray(mask)
    mask.setflags(write=False)
    return Variety("paraboloid", field, d, mask)


@lru_cache(maxsize=None)
def subspace_H(field: Field, d: int) -> Variety:
    """``H = {0}^d x F_q^(d-1) x {0}``, a linear subspace of the flat disk."""
    _check_d(d)
    mask = np.zeros(grid_shape(field, 2 * d), dtype=bool)
    idx = (0,) * d + (slice(None),) * (d - 1) + (0,)
    mask[idx] = True
    mask.setflags(write=False)
    return Variety("subspace_H", field, d, mask)


def make_variety(kind: str, field: Field, d: int) -> Variety:
    try:
        builder = {"flat_disk": flat_disk, "flat": flat_disk, "paraboloid": paraboloid,
                   "parab": paraboloid, "subspace_H": subspace_H, "H": subspace_H}[kind]
    except KeyError:
        raise ValueError(f"unknown variety {kind!r}") from None
    return builder(field, d)


@dataclass(frozen=True, eq=False)
class SurfaceMeasure:
    """Normalised counting measure on V, seen as the density q^n/|V| * 1_V against dx."""

    variety: Variety

    @property
    def weight(self) -> Fraction:
        v = self.variety
        return Fraction(v.field.q**v.n, v.size)

    def density(self) -> np.ndarray:
        """weight * 1_V as an object array of Fractions."""
        out = np.zeros(self.variety.mask.shape, dtype=object)
        out[...] = Fraction(0)
        out[self.variety.mask] = self.weight
        return out

    def total_mass(self) -> Fraction:
        v = self.variety
        return self.weight * v.size / v.field.q**v.n


def surface_measure(v: Variety) -> SurfaceMeasure:
    return SurfaceMeasure(v)


# ----------------------------------------------------------------------
# Omega partition of F_q^(2d)
# ----------------------------------------------------------------------


def omega_classify(m, d: int) -> int:
    """Class j in 0..5 of a point m in F_q^(2d) (coordinates as indices or field elements)."""
    m = [int(c.index) if hasattr(c, "index") else int(c) for c in m]
    if len(m) != 2 * d:
        raise ValueError(f"point has dimension {len(m)}, expected {2 * d}")
    md, m2d = m[d - 1], m[2 * d - 1]
    mid = m[d : 2 * d - 1]
    if md == 0 and m2d == 0:
        return 0 if not any(m) else 1
    if md == 0:
        return 2
    if m2d == 0:
        return 4 if not any(mid) else 3
    return 5


def omega_class_sizes(q: int, d: int) -> dict[int, int]:
    k = q ** (d - 1)
    return {
        0: 1,
        1: q ** (2 * d - 2) - 1,
        2: q ** (2 * d - 2) * (q - 1),
        3: (q - 1) * (k - 1) * k,
        4: (q - 1) * k,
        5: (q - 1) ** 2 * q ** (2 * d - 2),
    }


@lru_cache(maxsize=None)
def omega_labels(field: Field, d: int) -> np.ndarray:
    """int8 array of shape (q,)*(2d) holding each point's Omega class.

    Class sizes are cross-checked against the closed-form counts.
    """
    _check_d(d)
    c = coordinates(field, 2 * d)
    md0 = c[d - 1] == 0
    m2d0 = c[2 * d - 1] == 0
    mid0 = np.ones((1,) * (2 * d), dtype=bool)
    for i in range(d, 2 * d - 1):
        mid0 = mid0 & (c[i] == 0)
    rest0 = np.ones((1,) * (2 * d), dtype=bool)
    for i in itertools.chain(range(d - 1), range(d, 2 * d - 1)):
        rest0 = rest0 & (c[i] == 0)
    shape = grid_shape(field, 2 * d)
    labels = np.full(shape, 5, dtype=np.int8)
    labels[np.broadcast_to(md0 & ~m2d0, shape)] = 2
    labels[np.broadcast_to(~md0 & m2d0 & ~mid0, shape)] = 3
    labels[np.broadcast_to(~md0 & m2d0 & mid0, shape)] = 4
    labels[np.broadcast_to(md0 & m2d0, shape)] = 1
    labels[np.broadcast_to(md0 & m2d0 & rest0, shape)] = 0
    counts = np.bincount(labels.ravel(), minlength=6)
    expected = omega_class_sizes(field.q, d)
    if any(int(counts[j]) != expected[j] for j in range(6)):
        raise RuntimeError(f"Omega class sizes {counts.tolist()} disagree with {expected}")
    labels.setflags(write=False)
    return labels
