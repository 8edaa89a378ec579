"""Norms, extension and restriction, operator-norm lower bounds, probes and the Kakeya maximal operator."""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .cyclo import CycloArray
from .field import Field
from .grid import dot_table, grid_shape
from .report import Report
from .transform import (
    COUNTING,
    NORMALIZED,
    SURFACE,
    ContractError,
    GridFunction,
    _fast_float,
    convolve_counting,
    fourier_forward,
    inner_product,
    inverse_vs_measure,
)
from .varieties import Variety, flat_disk, omega_class_sizes, paraboloid, subspace_H

__all__ = [
    "as_exponent",
    "holder_conjugate",
    "lp_norm",
    "extend",
    "restrict",
    "sigma_check",
    "adjointness_check",
    "rr_star_check",
    "identity_suite",
    "OperatorEstimate",
    "opnorm_lower",
    "PROBES",
    "probe_function",
    "probe_ratio",
    "probe_ratio_direct",
    "probe_closed_form",
    "subspace_probe_exponent",
    "kakeya_lines",
    "kakeya_maximal",
    "kakeya_ratio",
    "kakeya_test_inputs",
    "kakeya_lower_bound",
    "product_inequality_diagnostic",
]

INF = math.inf


def as_exponent(x) -> Fraction | float:
    """Exact Fraction for finite exponents, ``math.inf`` for infinity."""
    if isinstance(x, str):
        s = x.strip().lower()
        if s in ("inf", "infinity", "oo"):
            return INF
        return Fraction(s)
    if isinstance(x, float):
        return INF if math.isinf(x) else Fraction(x).limit_denominator(10**9)
    return Fraction(x)


def holder_conjugate(p) -> Fraction | float:
    p = as_exponent(p)
    if p == INF:
        return Fraction(1)
    if p == 1:
        return INF
    if p < 1:
        raise ValueError(f"no Holder conjugate for p={p} < 1")
    return p / (p - 1)


def _moduli(f: GridFunction) -> np.ndarray:
    if f.backend == "exact":
        return np.abs(f.values.to_complex())
    return np.abs(f.values)


def _power_mean(a: np.ndarray, p, weight: float) -> float:
    """(weight * sum a^p)^(1/p) for nonnegative a, computed without overflow."""
    if p == INF:
        return float(np.max(a, initial=0.0))
    top = float(np.max(a, initial=0.0))
    if top == 0.0:
        return 0.0
    pf = float(p)
    return top * (weight * float(np.sum((a / top) ** pf))) ** (1.0 / pf)


def lp_norm(f: GridFunction, p, measure: str | None = None) -> float:
    """L^p norm under the counting, normalised or surface measure (default: f's own tag)."""
    p = as_exponent(p)
    if p < 1:
        raise ValueError(f"L^p norms need p >= 1, got {p}")
    measure = measure or f.measure
    a = _moduli(f)
    if measure == COUNTING:
        return _power_mean(a, p, 1.0)
    if measure == NORMALIZED:
        return _power_mean(a, p, 1.0 / a.size)
    if measure == SURFACE:
        if f.variety is None:
            raise ContractError("surface norms need a variety")
        return _power_mean(a[f.variety.mask], p, 1.0 / f.variety.size)
    raise ContractError(f"unknown measure {measure!r}")


# ----------------------------------------------------------------------
# extension and restriction
# ----------------------------------------------------------------------


def extend(f: GridFunction) -> GridFunction:
    """R*f = (f dsigma)^v, a counting-measure function on F_q^n."""
    if f.measure != SURFACE:
        raise ContractError("extend expects a function on a variety (surface measure)")
    return inverse_vs_measure(f)


def restrict(g: GridFunction, variety: Variety) -> GridFunction:
    """Rg = g^ restricted to the variety, carried with the surface measure."""
    if variety.field != g.field or variety.n != g.n:
        raise ContractError("variety does not live in the space of g")
    hat = fourier_forward(g)
    return GridFunction(g.field, g.n, hat.values, SURFACE, variety)


@lru_cache(maxsize=32)
def _sigma_check_cached(variety: Variety, backend: str) -> GridFunction:
    one = GridFunction.indicator(variety.field, variety.mask, SURFACE, variety, backend="exact")
    s = inverse_vs_measure(one)
    return s if backend == "exact" else s.as_float()


def sigma_check(variety: Variety, backend: str = "exact") -> GridFunction:
    """(dsigma)^v for the variety, by transform."""
    return _sigma_check_cached(variety, backend)


def _close(a, b, tol: float) -> tuple[bool, float]:
    if not isinstance(a, (complex, float, int)):
        return a == b, 0.0
    dev = abs(complex(a) - complex(b))
    scale = max(abs(complex(a)), abs(complex(b)), 1e-300)
    return dev <= tol * scale or dev <= 1e-300, dev / scale


def adjointness_check(g: GridFunction, f: GridFunction, tol: float = 1e-10):
    """<Rg, f>_{L^2(sigma)} against <g, R*f>_{L^2(dm)}; returns (lhs, rhs, ok)."""
    lhs = inner_product(restrict(g, f.variety), f)
    rhs = inner_product(g, extend(f))
    ok, _ = _close(lhs, rhs, tol)
    return lhs, rhs, ok


def rr_star_check(g: GridFunction, variety: Variety | None = None, tol: float = 1e-10) -> Report:
    """||g^||^2_{L^2(sigma)} = <g, g * (dsigma)^v>, exactly on the exact backend."""
    if g.measure != COUNTING:
        raise ContractError("rr_star_check expects a counting-measure function")
    variety = variety or flat_disk(g.field, g.n // 2)
    rg = restrict(g, variety)
    lhs = inner_product(rg, rg)
    rhs = inner_product(g, convolve_counting(g, sigma_check(variety, g.backend)))
    ok, rel = _close(lhs, rhs, tol)
    r = Report("rr_star", config={"q": g.field.q, "p": g.field.p, "ell": g.field.ell,
                                  "d": g.n // 2, "backend": g.backend})
    r.add("rr_star_identity", lhs, rhs, ok, relative_deviation=rel)
    return r


# ----------------------------------------------------------------------
# randomized identity suite
# ----------------------------------------------------------------------


def _random_values(rng: np.random.Generator, field: Field, shape, backend: str):
    if backend == "exact":
        return CycloArray(field.p, rng.integers(-2, 3, size=tuple(shape) + (field.p,)))
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def _array_dev(a: GridFunction, b: GridFunction) -> tuple[bool, float]:
    if a.backend == "exact":
        return bool(np.all(a.values.equal(b.values))), 0.0
    diff = float(np.max(np.abs(a.values - b.values), initial=0.0))
    scale = max(float(np.max(np.abs(a.values), initial=0.0)),
                float(np.max(np.abs(b.values), initial=0.0)), 1e-300)
    return diff / scale <= 1e-10, diff / scale


def identity_suite(field: Field, d: int, trials: int = 100, backend: str = "exact",
                   seed: int = 0, tol: float = 1e-10,
                   only: tuple[str, ...] | None = None) -> Report:
    """Plancherel, inversion, convolution theorem, adjointness and RR* on random inputs.

    Exact backend compares cyclotomic values exactly; float backend uses a
    relative tolerance.
    """
    rng = np.random.default_rng(seed)
    n = 2 * d
    shape = grid_shape(field, n)
    V = flat_disk(field, d)
    names = only or ("plancherel", "inversion", "convolution", "adjointness", "rr_star")
    passed = {k: 0 for k in names}
    worst = {k: 0.0 for k in names}

    def record(name, ok, dev):
        passed[name] += bool(ok)
        worst[name] = max(worst[name], dev)

    for _ in range(trials):
        g = GridFunction(field, n, _random_values(rng, field, shape, backend))
        ghat = fourier_forward(g)
        if "plancherel" in names:
            record("plancherel", *_close(inner_product(ghat, ghat), inner_product(g, g), tol))
        if "inversion" in names:
            record("inversion", *_array_dev(inverse_vs_measure(ghat), g))
        if "convolution" in names:
            g2 = GridFunction(field, n, _random_values(rng, field, shape, backend))
            lhs = fourier_forward(convolve_counting(g, g2))
            prod = ghat.values * fourier_forward(g2).values
            record("convolution", *_array_dev(lhs, ghat.replace(values=prod)))
        if "adjointness" in names or "rr_star" in names:
            rg = GridFunction(field, n, ghat.values, SURFACE, V)
        if "adjointness" in names:
            f = GridFunction(field, n, _random_values(rng, field, shape, backend), SURFACE, V)
            lhs = inner_product(rg, f)
            rhs = inner_product(g, extend(f))
            record("adjointness", *_close(lhs, rhs, tol))
        if "rr_star" in names:
            lhs = inner_product(rg, rg)
            rhs = inner_product(g, convolve_counting(g, sigma_check(V, backend)))
            record("rr_star", *_close(lhs, rhs, tol))

    report = Report("verify identities", config={"q": field.q, "p": field.p, "ell": field.ell,
                                                 "d": d, "backend": backend, "trials": trials,
                                                 "seed": seed})
    for k in names:
        report.add(k, passed[k], trials, passed[k] == trials, q=field.q, p=field.p,
                   ell=field.ell, d=d, max_relative_deviation=worst[k])
    return report


# ----------------------------------------------------------------------
# operator-norm lower bounds by nonlinear power iteration
# ----------------------------------------------------------------------


@dataclass
class OperatorEstimate:
    """Certified lower bound for R*(2 -> r) on a variety, with its witness."""

    variety: Variety
    p: Fraction
    r: Fraction
    best: float
    witness: np.ndarray
    starts: list[dict] = dc_field(default_factory=list)
    trace: list[float] = dc_field(default_factory=list)
    converged: bool = True
    monotone: bool = True

    @property
    def status(self) -> str:
        return "converged" if self.converged else "unconverged"

    def witness_function(self) -> GridFunction:
        v = self.variety
        vals = np.zeros(v.mask.shape, dtype=np.complex128)
        vals.reshape(-1)[v.indices] = self.witness
        return GridFunction(v.field, v.n, vals, SURFACE, v)

    def reevaluate(self) -> float:
        """Ratio of the stored witness, recomputed through the public transform path."""
        f = self.witness_function()
        return lp_norm(extend(f), self.r) / lp_norm(f, self.p)

    def to_json(self) -> dict:
        return {
            "variety": self.variety.kind,
            "d": self.variety.d,
            "q": self.variety.field.q,
            "p": str(self.p),
            "r": str(self.r),
            "best": self.best,
            "status": self.status,
            "monotone": self.monotone,
            "starts": self.starts,
        }


class _Extension:
    """Batched E (on V, columns) -> (E f)(m) and its L^2(sigma) adjoint (restriction)."""

    def __init__(self, variety: Variety):
        self.variety = variety
        self.field = variety.field
        self.n = variety.n
        self.shape = variety.mask.shape
        self.idx = variety.indices
        self.size = variety.size

    def apply(self, cols: np.ndarray) -> np.ndarray:
        k = cols.shape[1]
        grid = np.zeros((math.prod(self.shape), k), dtype=np.complex128)
        grid[self.idx] = cols
        out = _fast_float(grid.reshape(self.shape + (k,)), self.field, +1, self.n)
        return out.reshape(-1, k) / self.size

    def adjoint(self, cols: np.ndarray) -> np.ndarray:
        k = cols.shape[1]
        out = _fast_float(cols.reshape(self.shape + (k,)), self.field, -1, self.n)
        return out.reshape(-1, k)[self.idx]


def _structured_starts(variety: Variety) -> list[tuple[str, np.ndarray]]:
    size = variety.size
    starts = [("constant", np.ones(size, dtype=np.complex128))]
    point = np.zeros(size, dtype=np.complex128)
    point[0] = 1.0
    starts.append(("point_mass", point))
    if variety.kind == "flat_disk":
        h = subspace_H(variety.field, variety.d).mask.reshape(-1)[variety.indices]
        starts.append(("subspace_H", h.astype(np.complex128)))
    return starts


def opnorm_lower(variety: Variety, r, p=2, restarts: int = 16, iters: int = 500,
                 tol: float = 1e-10, seed: int = 0) -> OperatorEstimate:
    """Lower bound for R*(2 -> r) by the iteration f <- normalize(R(|Ef|^(r-2) Ef)).

    ``||Ef||_r^r`` is convex, so each normalised gradient step cannot lower
    the objective; a drop beyond relative 1e-12 marks the run non-monotone.
    All starts (constant, point mass, 1_H, seeded complex Gaussians) run as
    one batch.
    """
    r = as_exponent(r)
    p = as_exponent(p)
    if p != 2:
        raise ValueError("only the L^2 source norm is supported")
    if r == INF or r < 2:
        raise ValueError(f"need finite r >= 2, got {r}")
    rf = float(r)
    E = _Extension(variety)
    rng = np.random.default_rng(seed)
    starts = _structured_starts(variety)
    for i in range(restarts):
        z = rng.standard_normal(variety.size) + 1j * rng.standard_normal(variety.size)
        starts.append((f"random_{i}", z))
    labels = [s[0] for s in starts]
    F = np.stack([s[1] for s in starts], axis=1)

    def sigma_norm(cols):
        return np.sqrt(np.mean(np.abs(cols) ** 2, axis=0))

    def objective(ef):
        a = np.abs(ef)
        top = a.max(axis=0)
        top = np.where(top == 0, 1.0, top)
        return top * np.sum((a / top) ** rf, axis=0) ** (1.0 / rf)

    F = F / sigma_norm(F)
    EF = E.apply(F)
    obj = objective(EF)
    traces = [[float(v)] for v in obj]
    active = np.ones(F.shape[1], dtype=bool)
    monotone = np.ones(F.shape[1], dtype=bool)
    steps = np.zeros(F.shape[1], dtype=int)
    for _ in range(iters):
        if not active.any():
            break
        cols = np.flatnonzero(active)
        ef = EF[:, cols]
        grad = E.adjoint(np.abs(ef) ** (rf - 2) * ef)
        nrm = sigma_norm(grad)
        dead = nrm == 0
        nrm[dead] = 1.0
        newF = grad / nrm
        newEF = E.apply(newF)
        new_obj = objective(newEF)
        for k, c in enumerate(cols):
            if dead[k]:
                active[c] = False
                continue
            old = obj[c]
            if new_obj[k] < old * (1 - 1e-12):
                monotone[c] = False
            F[:, c] = newF[:, k]
            EF[:, c] = newEF[:, k]
            obj[c] = new_obj[k]
            traces[c].append(float(new_obj[k]))
            steps[c] += 1
            if abs(new_obj[k] - old) <= tol * max(abs(old), 1e-300):
                active[c] = False
    converged = ~active
    best = int(np.argmax(obj))
    return OperatorEstimate(
        variety=variety,
        p=p,
        r=r,
        best=float(obj[best]),
        witness=F[:, best].copy(),
        starts=[
            {"start": labels[i], "ratio": float(obj[i]), "iterations": int(steps[i]),
             "converged": bool(converged[i]), "monotone": bool(monotone[i])}
            for i in range(len(labels))
        ],
        trace=traces[best],
        converged=bool(converged.all()),
        monotone=bool(monotone.all()),
    )


# ----------------------------------------------------------------------
# probes
# ----------------------------------------------------------------------

PROBES = ("constant", "subspace_H", "delta")


def probe_function(probe: str, field: Field, d: int, backend: str = "exact") -> GridFunction:
    V = flat_disk(field, d)
    if probe == "constant":
        mask = V.mask
    elif probe == "subspace_H":
        mask = subspace_H(field, d).mask
    elif probe == "delta":
        mask = np.zeros(V.mask.shape, dtype=bool)
        mask[(0,) * (2 * d)] = True
    else:
        raise ValueError(f"unknown probe {probe!r}; choose from {PROBES}")
    return GridFunction.indicator(field, mask, SURFACE, V, backend=backend)


def probe_ratio(probe: str, p, r, field: Field, d: int, naive: bool = False) -> float:
    """||(f dsigma)^v||_{L^r(dm)} / ||f||_{L^p(sigma)} for a structured probe f.

    The transform is exact; only the final norms are taken in floating point.
    ``naive=True`` uses the quadratic-cost character sum instead of the fast path.
    """
    f = probe_function(probe, field, d)
    ext = inverse_vs_measure(f, naive=naive)
    return lp_norm(ext, r) / lp_norm(f, p)


@lru_cache(maxsize=8)
def _direct_extension(probe: str, field: Field, d: int, chunk: int) -> tuple[GridFunction, GridFunction]:
    f = probe_function(probe, field, d, backend="float")
    support = np.argwhere(f.values.real != 0)
    weights = f.values[tuple(support.T)]
    shape = grid_shape(field, 2 * d)
    total = math.prod(shape)
    roots = np.exp(2j * np.pi * np.arange(field.p) / field.p)
    ext = np.zeros(total, dtype=np.complex128)
    step = max(1, chunk // max(1, len(support)))
    for start in range(0, total, step):
        flat = np.arange(start, min(total, start + step))
        ms = np.stack(np.unravel_index(flat, shape), axis=1)
        dots = dot_table(field, support[:, None, :], ms[None, :, :])
        ext[flat] = weights @ roots[field.trace_table[dots]] / f.variety.size
    return f, GridFunction(field, 2 * d, ext.reshape(shape))


def probe_ratio_direct(probe: str, p, r, field: Field, d: int, chunk: int = 1 << 22) -> float:
    """Same ratio as :func:`probe_ratio`, summing characters over the probe's support directly.

    Independent of the axis-wise transform: every value is
    |V|^-1 sum_{x in supp f} f(x) chi(x.m) computed from field dot products.
    """
    f, ext = _direct_extension(probe, field, d, chunk)
    return lp_norm(ext, r) / lp_norm(f, p)


def subspace_probe_exponent(p, r, d: int) -> Fraction:
    """Exponent of q in the 1_H probe ratio: (d+1)/r + (1-d)(1-1/p)."""
    ip = Fraction(0) if as_exponent(p) == INF else 1 / as_exponent(p)
    ir = Fraction(0) if as_exponent(r) == INF else 1 / as_exponent(r)
    return (d + 1) * ir + (1 - d) * (1 - ip)


def probe_closed_form(probe: str, p, r, q: int, d: int) -> float:
    """Probe ratio from the known moduli of the probe extensions."""
    p, r = as_exponent(p), as_exponent(r)
    ip = 0.0 if p == INF else 1.0 / float(p)
    if probe == "subspace_H":
        return float(q) ** float(subspace_probe_exponent(p, r, d))
    if probe == "delta":
        ir = 0.0 if r == INF else 1.0 / float(r)
        return float(q) ** ((2 - 2 * d) * (1 - ip) + 2 * d * ir)
    if probe == "constant":
        sizes = omega_class_sizes(q, d)
        small = float(q) ** (1 - d)
        mid = float(q) ** ((1 - d) / 2)
        if r == INF:
            return 1.0
        rf = float(r)
        total = 1.0 + (sizes[2] + sizes[5]) * small**rf + sizes[4] * mid**rf
        return total ** (1 / rf)
    raise ValueError(f"unknown probe {probe!r}")


# ----------------------------------------------------------------------
# Kakeya maximal operator
# ----------------------------------------------------------------------


@lru_cache(maxsize=32)
def kakeya_lines(field: Field, d: int) -> np.ndarray:
    """Flat indices of every line l(z0, v) = {(z0 + t v, t)}: shape (q^(d-1), q^(d-1), q).

    Axis 0 runs over directions v, axis 1 over base points z0, axis 2 over t.
    """
    if d < 2:
        raise ValueError("Kakeya lines need d >= 2")
    q = field.q
    k = d - 1
    dirs = np.stack(np.unravel_index(np.arange(q**k), (q,) * k), axis=1)
    t = np.arange(q)
    out = np.zeros((q**k, q**k, q), dtype=np.int64)
    for i in range(k):
        step = field.mul[dirs[:, i][:, None], t[None, :]]
        coord = field.add[dirs[:, i][None, :, None], step[:, None, :]]
        out = out * q + coord
    out = out * q + t[None, None, :]
    out.setflags(write=False)
    return out


def kakeya_maximal(h: GridFunction) -> GridFunction:
    """h*(v) = max over z0 of the sum of |h| along l(z0, v); lives on F_q^(d-1) with dv."""
    if h.measure != COUNTING:
        raise ContractError("kakeya_maximal expects a counting-measure function on F_q^d")
    d = h.n
    lines = kakeya_lines(h.field, d)
    a = _moduli(h).reshape(-1)
    sums = a[lines].sum(axis=2)
    star = sums.max(axis=1).reshape(grid_shape(h.field, d - 1))
    return GridFunction(h.field, d - 1, star.astype(np.complex128), NORMALIZED)


def kakeya_ratio(h: GridFunction, p, r) -> float:
    """||h*||_{L^r(dv)} / ||h||_{L^p(dm)}, a lower bound for K(p -> r)."""
    denom = lp_norm(h, p, COUNTING)
    if denom == 0:
        raise ValueError("kakeya_ratio needs a nonzero h")
    return lp_norm(kakeya_maximal(h), r, NORMALIZED) / denom


def kakeya_test_inputs(field: Field, d: int, seed: int = 0) -> dict[str, GridFunction]:
    """Point mass, constant, a single line, a random function and a union of one line per direction."""
    rng = np.random.default_rng(seed)
    shape = grid_shape(field, d)
    size = field.q**d
    lines = kakeya_lines(field, d)
    single = np.zeros(size)
    single[lines[1 % lines.shape[0], 0]] = 1.0
    union = np.zeros(size)
    picks = rng.integers(0, lines.shape[1], size=lines.shape[0])
    union[lines[np.arange(lines.shape[0]), picks].reshape(-1)] = 1.0
    return {
        "point_mass": GridFunction.delta(field, (0,) * d),
        "constant": GridFunction.constant(field, d),
        "single_line": GridFunction(field, d, single.reshape(shape)),
        "random": GridFunction(field, d, rng.random(shape)),
        "line_union": GridFunction(field, d, union.reshape(shape)),
    }


def kakeya_lower_bound(field: Field, d: int, p, r, seed: int = 0) -> tuple[float, str]:
    """Best kakeya_ratio over the standard test inputs, with the winning input's name."""
    best, name = -1.0, ""
    for label, h in kakeya_test_inputs(field, d, seed).items():
        val = kakeya_ratio(h, p, r)
        if val > best:
            best, name = val, label
    return best, name


def product_inequality_diagnostic(d: int, r, p, field: Field, restarts: int = 4, iters: int = 200,
                          seed: int = 0) -> Report:
    """Flat-disk, paraboloid and Kakeya lower bounds side by side for the product inequality.

    All three numbers are lower bounds, so nothing about the inequality can
    fail; a left side above the product is flagged as interesting.
    """
    p, r = as_exponent(p), as_exponent(r)
    if p < 2 or r < 2:
        raise ValueError("the product inequality needs p, r >= 2")
    flat_probe = max(probe_ratio(pr, p, r, field, d) for pr in PROBES)
    flat = flat_probe
    flat_source = "probes"
    if p == 2 and r != INF:
        est = opnorm_lower(flat_disk(field, d), r, restarts=restarts, iters=iters, seed=seed)
        if est.best > flat:
            flat, flat_source = est.best, "opnorm_lower"
    parab = opnorm_lower(paraboloid(field, d), r, restarts=restarts, iters=iters, seed=seed)
    k_src = holder_conjugate(r / 2 if r != INF else INF)
    k_dst = holder_conjugate(p / 2 if p != INF else INF)
    kak, kak_input = kakeya_lower_bound(field, d, k_src, k_dst, seed)
    product = parab.best * math.sqrt(kak)
    report = Report("product_inequality", config={"q": field.q, "p": field.p, "ell": field.ell, "d": d,
                                          "source_exponent": str(p), "target_exponent": str(r)})
    params = dict(q=field.q, p=field.p, ell=field.ell, d=d)
    valid = all(math.isfinite(x) and x >= 0 for x in (flat, parab.best, kak))
    report.add("lower_bounds_valid", valid, True, valid, **params)
    report.data.update(
        flat_lower=flat, flat_source=flat_source, paraboloid_lower=parab.best,
        kakeya_lower=kak, kakeya_input=kak_input,
        kakeya_exponents=[str(k_src), str(k_dst)],
        product=product, interesting=bool(flat > product),
    )
    return report
