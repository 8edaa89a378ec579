"""The canonical additive character, Gauss sums and quadratic character sums.

Everything here is exact: ``chi(a)`` is ``zeta_p ** Tr(a)`` as a
:class:`~flatlab.cyclo.CycloValue`, and sums are accumulated as trace
histograms so no cyclotomic multiplication is needed.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .cyclo import CycloValue
from .field import Field, FieldElement, FieldError

__all__ = [
    "GaussSum",
    "chi",
    "char_sum_orthogonality",
    "gauss_sum",
    "quad_sum",
    "quad_sum_closed",
    "trace_histogram_value",
]


def trace_histogram_value(field: Field, indices, weights=None) -> CycloValue:
    """Exact value of ``sum_i w_i * chi(x_i)`` for field-element indices ``x_i``."""
    tr = field.trace_table[np.asarray(indices, dtype=np.int64).ravel()]
    w = None if weights is None else np.asarray(weights, dtype=np.int64).ravel()
    hist = np.bincount(tr, weights=w, minlength=field.p)
    return CycloValue.from_redundant(field.p, [int(round(h)) for h in hist])


def chi(a: FieldElement) -> CycloValue:
    return CycloValue.zeta(a.field.p, a.trace())


def char_sum_orthogonality(a: FieldElement) -> CycloValue:
    """``sum_t chi(a t)`` over all of F_q: q when a = 0, zero otherwise."""
    F = a.field
    return trace_histogram_value(F, F.mul[a.index, np.arange(F.q)])


@dataclass(frozen=True)
class GaussSum:
    field: Field
    value: CycloValue

    def squared(self) -> CycloValue:
        return self.value * self.value

    def power(self, k: int) -> CycloValue:
        return _gauss_power(self.field, k)


@lru_cache(maxsize=None)
def _gauss_value(field: Field) -> CycloValue:
    t = np.arange(1, field.q)
    return trace_histogram_value(field, t, field.eta_table[t])


@lru_cache(maxsize=None)
def _gauss_power(field: Field, k: int) -> CycloValue:
    return _gauss_value(field) ** k


def gauss_sum(field: Field) -> GaussSum:
    """The standard Gauss sum ``G = sum_{t != 0} eta(t) chi(t)``."""
    return GaussSum(field, _gauss_value(field))


def quad_sum(a: FieldElement, b: FieldElement) -> CycloValue:
    """Direct evaluation of ``sum_t chi(a t^2 + b t)``; requires a != 0."""
    if a.index == 0:
        raise FieldError("quad_sum needs a != 0 (a = 0 is the orthogonality sum)")
    F = a.field
    t = np.arange(F.q)
    arg = F.add[F.mul[a.index, F.mul[t, t]], F.mul[b.index, t]]
    return trace_histogram_value(F, arg)


def quad_sum_closed(a: FieldElement, b: FieldElement) -> CycloValue:
    """Completed-square form ``eta(a) * G * chi(b^2 / (-4a))``."""
    if a.index == 0:
        raise FieldError("quad_sum needs a != 0 (a = 0 is the orthogonality sum)")
    F = a.field
    phase = (b * b) / (-(a * 4))
    return _gauss_value(F).shift(phase.trace()) * a.eta()


def complete_square_exhaustive(field: Field) -> tuple[int, list]:
    """Check sum_t chi(a t^2 + b t) = eta(a) G chi(b^2/(-4a)) for every a != 0 and b.

    Returns the number of pairs checked and a list of failing (a, b).
    """
    F = field
    p, q = F.p, F.q
    a = np.arange(1, q)[:, None, None]
    b = np.arange(q)[None, :, None]
    t = np.arange(q)[None, None, :]
    arg = F.add[F.mul[a, F.mul[t, t]], F.mul[b, t]]
    tr = F.trace_table[arg]
    counts = np.zeros((q - 1, q, p), dtype=np.int64)
    for k in range(p):
        counts[..., k] = (tr == k).sum(axis=-1)
    direct = counts[..., :-1] - counts[..., -1:]

    g = _gauss_value(F)
    gred = np.array([int(c) for c in g.coeffs] + [0], dtype=np.int64)
    a2, b2 = a[..., 0], b[..., 0]
    four_a = F.mul[a2, 4 % p]
    phase = F.trace_table[F.mul[F.mul[b2, b2], F.inv[F.neg[four_a]]]]
    j = np.arange(p)
    rolled = gred[(j - phase[..., None]) % p] * F.eta_table[a2][..., None]
    closed = rolled[..., :-1] - rolled[..., -1:]
    bad = np.argwhere(np.any(direct != closed, axis=-1))
    return (q - 1) * q, [(int(x) + 1, int(y)) for x, y in bad]


def verify_gauss(qs, square_max: int = 27):
    """G^2 = eta(-1) q for each order in ``qs``; complete-the-square exhaustively when q <= square_max."""
    from .field import field_of_order
    from .report import Report

    r = Report("verify gauss", config={"qs": list(qs), "square_max": square_max})
    for q in qs:
        F = field_of_order(q)
        params = dict(q=q, p=F.p, ell=F.ell)
        g2 = gauss_sum(F).squared()
        want = F.eta_minus_one() * q
        r.add("gauss_square", g2.to_json(), want, g2 == want, **params)
        if q <= square_max:
            n, bad = complete_square_exhaustive(F)
            r.add("complete_square_pairs_failed", len(bad), 0, not bad, checked=n, **params)
    return r
