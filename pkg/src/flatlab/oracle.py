"""Closed forms for the flat disk's (dsigma)^v, the Omega-class transforms and the kernels K_j.

Every closed form here has a brute-force twin (the exact fast transform of
an indicator), and the ``verify_*`` functions compare them point by point.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

import numpy as np

from .characters import gauss_sum
from .cyclo import CycloArray, CycloValue
from .field import Field
from .grid import coordinates, grid_shape, point_index
from .report import Report
from .transform import SURFACE, GridFunction, fourier_forward, inverse_vs_measure
from .varieties import flat_disk, omega_class_sizes, omega_classify, omega_labels

__all__ = [
    "sigma_ft_closed",
    "sigma_ft_closed_grid",
    "sigma_ft_brute",
    "verify_sigma_ft",
    "omega_hat_closed",
    "omega_hat_closed_grid",
    "kernel",
    "kernel_hat",
    "kernel_hat_expansion",
    "kernel_stats",
    "modulus_profile",
    "decay_profile",
    "verify_kernels",
]


def _as_point(field: Field, m) -> tuple[int, ...]:
    return point_index(field, m)


def _sigma_scalar_parts(field: Field, m: tuple[int, ...]):
    d = len(m) // 2
    F = field
    E = F.element
    md, m2d = E(m[d - 1]), E(m[2 * d - 1])
    cross = F.zero
    sq1 = F.zero
    sq2 = F.zero
    for i in range(d - 1):
        cross = cross + E(m[i]) * E(m[d + i])
        sq1 = sq1 + E(m[i]) * E(m[i])
        sq2 = sq2 + E(m[d + i]) * E(m[d + i])
    return d, md, m2d, cross, sq1, sq2


def sigma_ft_closed(field: Field, m) -> CycloValue:
    """Closed-form (dsigma)^v(m) on the flat disk in F_q^(2d), by Omega class.

    The Omega_4 branch keeps the Gauss sum power G^(d-1) exact instead of
    rewriting it through sqrt(q), so it is valid for every d.
    """
    m = _as_point(field, m)
    if len(m) % 2 or len(m) < 4:
        raise ValueError("point must lie in F_q^(2d) with d >= 2")
    d, md, m2d, cross, sq1, sq2 = _sigma_scalar_parts(field, m)
    p, q = field.p, field.q
    j = omega_classify(m, d)
    base = Fraction(1, q ** (d - 1))
    if j == 0:
        return CycloValue.one(p)
    if j in (1, 3):
        return CycloValue.zero(p)
    if j == 2:
        return CycloValue.zeta(p, (cross / -m2d).trace()) * base
    if j == 4:
        g = gauss_sum(field).power(d - 1)
        sign = md.eta() ** (d - 1)
        return g.shift((sq1 / -(md * 4)).trace()) * (base * sign)
    phase = (md * sq2 / (m2d * m2d)).trace() + (cross / -m2d).trace()
    return CycloValue.zeta(p, phase) * base


def sigma_ft_closed_grid(field: Field, d: int) -> CycloArray:
    """Vectorised closed form over all of F_q^(2d); denominator q^(d-1)."""
    F = field
    p, q = F.p, F.q
    c = coordinates(F, 2 * d)
    shape = grid_shape(F, 2 * d)
    zero = np.zeros((), dtype=np.int64)
    cross, sq1, sq2 = zero, zero, zero
    for i in range(d - 1):
        cross = F.add[cross, F.mul[c[i], c[d + i]]]
        sq1 = F.add[sq1, F.mul[c[i], c[i]]]
        sq2 = F.add[sq2, F.mul[c[d + i], c[d + i]]]
    md, m2d = c[d - 1], c[2 * d - 1]
    cross, sq1, sq2, md, m2d = np.broadcast_arrays(cross, sq1, sq2, md, m2d)
    labels = omega_labels(F, d)
    tr = F.trace_table

    phase2 = tr[F.mul[cross, F.inv[F.neg[m2d]]]]
    four_md = F.mul[md, 4 % p]
    phase4 = tr[F.mul[sq1, F.inv[F.neg[four_md]]]]
    phase5 = (tr[F.mul[F.mul[md, sq2], F.inv[F.mul[m2d, m2d]]]] + phase2) % p

    coeffs = np.zeros(shape + (p,), dtype=np.int64)
    qk = q ** (d - 1)
    coeffs[(0,) * (2 * d) + (0,)] = qk
    for j, ph in ((2, phase2), (5, phase5)):
        sel = labels == j
        coeffs[sel, ph[sel]] = 1

    sel = labels == 4
    gpow = gauss_sum(F).power(d - 1)
    if any(cf.denominator != 1 for cf in gpow.coeffs):
        raise ArithmeticError("Gauss sum powers have integer coordinates")
    gred = np.array([int(cf) for cf in gpow.coeffs] + [0], dtype=np.int64)
    sign = F.eta_table[md[sel]] ** (d - 1)
    j = np.arange(p)
    rolled = gred[(j[None, :] - phase4[sel][:, None]) % p]
    coeffs[sel] = rolled * sign[:, None]
    return CycloArray(p, coeffs, qk)


@lru_cache(maxsize=16)
def _sigma_brute_cached(field: Field, d: int) -> GridFunction:
    V = flat_disk(field, d)
    f = GridFunction.indicator(field, V.mask, measure=SURFACE, variety=V, backend="exact")
    return inverse_vs_measure(f)


def sigma_ft_brute(field: Field, d: int) -> GridFunction:
    """(dsigma)^v by definition: the exact inverse transform of 1 against dsigma."""
    return _sigma_brute_cached(field, d)


def verify_sigma_ft(field: Field, d: int, max_mismatches: int = 10) -> Report:
    """Exact, pointwise comparison of the closed form with the brute-force transform."""
    brute = sigma_ft_brute(field, d).values
    closed = sigma_ft_closed_grid(field, d)
    labels = omega_labels(field, d)
    diff = brute - closed
    canon = diff.canonical_numerators()
    dev = np.max(np.abs(canon), axis=-1)
    report = Report(
        "verify oracle",
        config={"q": field.q, "p": field.p, "ell": field.ell, "d": d},
    )
    per_class = {}
    for j in range(6):
        sel = labels == j
        mx = int(dev[sel].max()) if np.any(sel) else 0
        per_class[str(j)] = Fraction(mx, diff.denom)
        report.add(f"omega_{j}_max_dev", Fraction(mx, diff.denom), 0, mx == 0,
                   q=field.q, p=field.p, ell=field.ell, d=d)
    mismatches = []
    for flat in np.flatnonzero(dev.ravel() != 0)[:max_mismatches]:
        idx = np.unravel_index(flat, labels.shape)
        mismatches.append({
            "m": [int(i) for i in idx],
            "omega": int(labels[idx]),
            "closed": closed.value(idx).to_json(),
            "brute": brute.value(idx).to_json(),
        })
    # spot-check the scalar closed form against the grid version
    rng = np.random.default_rng(field.q * 100 + d)
    sample = rng.integers(0, field.q, size=(min(64, labels.size), 2 * d))
    scalar_ok = all(sigma_ft_closed(field, tuple(s)) == closed.value(tuple(s)) for s in sample)
    report.add("scalar_vs_grid_closed_form", scalar_ok, True, scalar_ok,
               q=field.q, p=field.p, ell=field.ell, d=d)
    report.data.update(
        q=field.q, p=field.p, ell=field.ell, d=d,
        points_checked=int(labels.size),
        per_class_max_dev=per_class,
        mismatches=mismatches,
    )
    return report


# ----------------------------------------------------------------------
# Omega-class transforms
# ----------------------------------------------------------------------


def omega_hat_closed(j: int, y, field: Field) -> int:
    """Closed form of the Fourier transform of 1_{Omega_j} for j in {2, 4, 5}."""
    y = _as_point(field, y)
    d = len(y) // 2
    q = field.q
    if j not in (2, 4, 5):
        raise ValueError(f"no closed form for Omega_{j}; compute it by transform")
    first = all(c == 0 for c in y[: d - 1])
    middle = all(c == 0 for c in y[d : 2 * d - 1])
    yd0 = int(y[d - 1] == 0)
    y2d0 = int(y[2 * d - 1] == 0)
    if j == 4:
        return q ** (d - 1) * int(first) * (q * yd0 - 1)
    block = int(first and middle)
    if j == 2:
        return q ** (2 * d - 2) * block * (q * y2d0 - 1)
    return q ** (2 * d - 2) * block * (q * yd0 - 1) * (q * y2d0 - 1)


def omega_hat_closed_grid(j: int, field: Field, d: int) -> np.ndarray:
    if j not in (2, 4, 5):
        raise ValueError(f"no closed form for Omega_{j}; compute it by transform")
    c = coordinates(field, 2 * d)
    q = field.q
    shape = grid_shape(field, 2 * d)
    first = np.ones((1,) * (2 * d), dtype=bool)
    for i in range(d - 1):
        first = first & (c[i] == 0)
    middle = np.ones((1,) * (2 * d), dtype=bool)
    for i in range(d, 2 * d - 1):
        middle = middle & (c[i] == 0)
    yd = q * (c[d - 1] == 0).astype(np.int64) - 1
    y2d = q * (c[2 * d - 1] == 0).astype(np.int64) - 1
    if j == 4:
        out = q ** (d - 1) * first * yd
    elif j == 2:
        out = q ** (2 * d - 2) * (first & middle) * y2d
    else:
        out = q ** (2 * d - 2) * (first & middle) * yd * y2d
    return np.broadcast_to(out, shape).astype(np.int64)


def omega_hat_brute(j: int, field: Field, d: int) -> np.ndarray:
    """Exact transform of 1_{Omega_j}; integer valued."""
    g = GridFunction.indicator(field, omega_labels(field, d) == j, backend="exact")
    hat = fourier_forward(g).values
    if hat.denom != 1:
        raise ArithmeticError("indicator transforms are integral")
    return hat.rational_numerators()


# ----------------------------------------------------------------------
# kernels K_j = (dsigma)^v 1_{Omega_j}
# ----------------------------------------------------------------------


def kernel(j: int, field: Field, d: int) -> GridFunction:
    if j not in range(0, 6):
        raise ValueError("j must be in 0..5")
    s = sigma_ft_brute(field, d)
    return s.replace(values=s.values.mask(omega_labels(field, d) == j))


@lru_cache(maxsize=32)
def kernel_hat(j: int, field: Field, d: int) -> GridFunction:
    return fourier_forward(kernel(j, field, d))


def kernel_hat_expansion(j: int, field: Field, d: int) -> np.ndarray:
    """K^_j written through sums of 1_F over shifted coordinates (object array of Fractions).

    j = 2:  q * A - B
    j = 5:  q^2 1_F - q * A - q * C + B
    j = 4:  q^(1-d) * (q * D - E)
    with A, C, B summing 1_F over x_d, over x_2d, and over both; D over
    x_(d+1..2d) and E over x_(d..2d).
    """
    mask = flat_disk(field, d).mask.astype(np.int64)
    q = field.q
    ad, a2d = d - 1, 2 * d - 1

    def fill(axes):
        return np.broadcast_to(mask.sum(axis=axes, keepdims=True), mask.shape)

    if j == 2:
        out = q * fill((ad,)) - fill((ad, a2d))
        return out.astype(object) * Fraction(1)
    if j == 5:
        out = q * q * mask - q * fill((ad,)) - q * fill((a2d,)) + fill((ad, a2d))
        return out.astype(object) * Fraction(1)
    if j == 4:
        dsum = fill(tuple(range(d, 2 * d)))
        esum = fill(tuple(range(d - 1, 2 * d)))
        return (q * dsum - esum).astype(object) * Fraction(1, q ** (d - 1))
    raise ValueError("expansions exist for j in {2, 4, 5}")


def _sup_abs2(values: CycloArray) -> tuple[Fraction | None, float]:
    """Exact sup of |v|^2 when every |v|^2 is rational, plus the float sup of |v|."""
    a2 = values.abs2()
    sup_float = float(np.sqrt(np.max(np.abs(values.to_complex()) ** 2, initial=0.0)))
    if not np.all(a2.is_rational()):
        return None, sup_float
    nums = a2.rational_numerators()
    mx = int(np.max(nums, initial=0))
    return Fraction(mx, a2.denom), sup_float


def kernel_stats(j: int, field: Field, d: int) -> dict:
    """sup |K_j| and sup |K^_j| (moduli squared exactly when rational, plus floats)."""
    k = kernel(j, field, d)
    sup2, sup = _sup_abs2(k.values)
    hat = kernel_hat(j, field, d)
    hsup2, hsup = _sup_abs2(hat.values)
    return {
        "j": j,
        "sup_abs2": sup2,
        "sup_abs": sup,
        "sup_hat_abs2": hsup2,
        "sup_hat_abs": hsup,
    }


def modulus_profile(field: Field, d: int) -> dict[int, set]:
    """Distinct exact values of |(dsigma)^v|^2 on each Omega class."""
    s = sigma_ft_brute(field, d).values
    a2 = s.abs2()
    nums = a2.rational_numerators()
    labels = omega_labels(field, d)
    return {
        j: {Fraction(int(v), a2.denom) for v in np.unique(nums[labels == j])}
        for j in range(6)
    }


def decay_profile(field: Field, d: int) -> Report:
    """max over m != 0 of |(dsigma)^v(m)|^2 and where it is attained."""
    s = sigma_ft_brute(field, d).values
    a2 = s.abs2()
    nums = a2.rational_numerators().copy()
    nums[(0,) * (2 * d)] = -1
    mx = int(nums.max())
    max_abs2 = Fraction(mx, a2.denom)
    labels = omega_labels(field, d)
    argmax = nums == mx
    on_omega4 = bool(np.array_equal(argmax, labels == 4))
    expected = Fraction(1, field.q ** (d - 1))
    r = Report("decay", config={"q": field.q, "p": field.p, "ell": field.ell, "d": d})
    params = dict(q=field.q, p=field.p, ell=field.ell, d=d)
    r.add("max_abs2_nonzero", max_abs2, expected, max_abs2 == expected, **params)
    r.add("attained_exactly_on_omega4", on_omega4, True, on_omega4, **params)
    r.data.update(max_abs=float(max_abs2) ** 0.5, argmax_count=int(argmax.sum()),
                  omega4_size=omega_class_sizes(field.q, d)[4])
    return r


def verify_kernels(field: Field, d: int) -> Report:
    """Kernel sup norms, the Omega-class transforms, the K^ expansions and the decomposition."""
    q = field.q
    params = dict(q=q, p=field.p, ell=field.ell, d=d)
    r = Report("verify kernels", config=dict(params))
    stats = {}
    for j in range(1, 6):
        st = kernel_stats(j, field, d)
        stats[str(j)] = st
    r.add("K1_identically_zero", stats["1"]["sup_abs2"], 0, stats["1"]["sup_abs2"] == 0, **params)
    r.add("K3_identically_zero", stats["3"]["sup_abs2"], 0, stats["3"]["sup_abs2"] == 0, **params)
    for j, want in ((2, Fraction(1, q ** (2 * d - 2))), (5, Fraction(1, q ** (2 * d - 2))),
                    (4, Fraction(1, q ** (d - 1)))):
        got = stats[str(j)]["sup_abs2"]
        r.add(f"sup_abs2_K{j}", got, want, got == want, **params)
    r.add("sup_abs_K4_hat_le_2q", stats["4"]["sup_hat_abs"], 2 * q,
          stats["4"]["sup_hat_abs"] <= 2 * q + 1e-9, **params)
    for j in (2, 5):
        got = stats[str(j)]["sup_hat_abs"]
        r.add(f"sup_abs_K{j}_hat_le_4q2", got, 4 * q * q, got <= 4 * q * q + 1e-9, **params)

    for j in (2, 4, 5):
        same = bool(np.array_equal(omega_hat_brute(j, field, d), omega_hat_closed_grid(j, field, d)))
        r.add(f"omega_hat_{j}_closed_form", same, True, same, **params)
        hat = kernel_hat(j, field, d).values
        ok = bool(np.all(hat.is_rational())) and bool(
            np.all(hat.to_rationals() == kernel_hat_expansion(j, field, d)))
        r.add(f"kernel_hat_{j}_expansion", ok, True, ok, **params)

    s = sigma_ft_brute(field, d).values
    total = CycloArray.zeros(field.p, s.shape)
    for j in range(1, 6):
        total = total + kernel(j, field, d).values
    origin = np.zeros(s.shape, dtype=bool)
    origin[(0,) * (2 * d)] = True
    total = total + CycloArray.from_integers(field.p, origin.astype(np.int64))
    ok = bool(np.all(total.equal(s)))
    r.add("decomposition_delta_plus_kernels", ok, True, ok, **params)

    profile = modulus_profile(field, d)
    want = {0: {Fraction(1)}, 1: {Fraction(0)}, 3: {Fraction(0)},
            2: {Fraction(1, q ** (2 * d - 2))}, 5: {Fraction(1, q ** (2 * d - 2))},
            4: {Fraction(1, q ** (d - 1))}}
    ok = all(profile[j] == want[j] for j in range(6) if omega_class_sizes(q, d)[j])
    r.add("modulus_profile", {str(k): sorted(v) for k, v in profile.items()},
          {str(k): sorted(v) for k, v in want.items()}, ok, **params)
    r.data["kernel_stats"] = stats
    return r
