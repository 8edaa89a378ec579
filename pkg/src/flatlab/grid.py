"""Index bookkeeping for F_q^n laid out as a C-ordered array of shape (q,)*n.

A point ``m = (m_1, ..., m_n)`` (field-element indices) lives at flat
position ``sum(m_i * q**(n-i))``, i.e. lexicographic with m_1 most
significant.
"""

from __future__ import annotations

import numpy as np

from .field import Field, FieldElement


def grid_shape(field: Field, n: int) -> tuple[int, ...]:
    return (field.q,) * n


def coordinates(field: Field, n: int) -> list[np.ndarray]:
    """Broadcastable per-axis index arrays, ``coords[i]`` has shape (q,)*n."""
    return list(np.indices(grid_shape(field, n), sparse=True))


def point_index(field: Field, point) -> tuple[int, ...]:
    out = []
    for c in point:
        if isinstance(c, FieldElement):
            out.append(c.index)
        else:
            c = int(c)
            if not 0 <= c < field.q:
                raise ValueError(f"coordinate {c} outside 0..{field.q - 1}")
            out.append(c)
    return tuple(out)


def flat_index(field: Field, point) -> int:
    return int(np.ravel_multi_index(point_index(field, point), grid_shape(field, len(point))))


def unflatten(field: Field, n: int, flat: int) -> tuple[int, ...]:
    return tuple(int(i) for i in np.unravel_index(flat, grid_shape(field, n)))


def dot_table(field: Field, xs, ms):
    """Field dot product of index-vector arrays along the last axis."""
    xs = np.asarray(xs)
    ms = np.asarray(ms)
    acc = field.mul[xs[..., 0], ms[..., 0]]
    for i in range(1, xs.shape[-1]):
        acc = field.add[acc, field.mul[xs[..., i], ms[..., i]]]
    return acc
