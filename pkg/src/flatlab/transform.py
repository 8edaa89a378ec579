"""Fourier analysis on F_q^n with the counting / normalised / surface conventions.

Conventions (``m`` on the counting side ``dm``, ``x`` on the dual with ``dx``)::

    g^(x)        = sum_m chi(-x.m) g(m)
    (f dx)^v(m)  = q^-n sum_x chi(x.m) f(x)
    (f dsigma)^v(m) = |V|^-1 sum_{x in V} chi(x.m) f(x)

Two backends share one code path: ``float`` (complex128 arrays) and
``exact`` (:class:`~flatlab.cyclo.CycloArray`).  The fast path applies a
dense q x q character matrix along each axis in turn, O(n q^(n+1)); the
naive O(q^(2n)) path is kept as an oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .cyclo import CycloArray, CycloValue
from .field import Field, make_field
from .grid import dot_table, grid_shape, point_index
from .varieties import Variety, make_variety

__all__ = [
    "ContractError",
    "GridFunction",
    "COUNTING",
    "NORMALIZED",
    "SURFACE",
    "fourier_forward",
    "inverse_vs_measure",
    "convolve_counting",
    "convolve_normalized",
    "naive_character_sum",
]

COUNTING = "counting"
NORMALIZED = "normalized"
SURFACE = "surface"
MEASURES = (COUNTING, NORMALIZED, SURFACE)

# float64 represents every integer below this exactly
_FLOAT_EXACT = 2**52


class ContractError(ValueError):
    """A GridFunction was used under the wrong measure, shape or field."""


@dataclass(frozen=True, eq=False)
class GridFunction:
    """A function on F_q^n, values laid out as an array of shape (q,)*n.

    ``values`` is a complex ndarray (float backend) or a CycloArray (exact
    backend).  For ``measure == "surface"`` the function lives on
    ``variety`` and is stored as zero off it.
    """

    field: Field
    n: int
    values: np.ndarray | CycloArray
    measure: str = COUNTING
    variety: Variety | None = dc_field(default=None)

    def __post_init__(self):
        if self.measure not in MEASURES:
            raise ContractError(f"unknown measure {self.measure!r}")
        if tuple(self.values.shape) != grid_shape(self.field, self.n):
            raise ContractError(
                f"values have shape {tuple(self.values.shape)}, expected {grid_shape(self.field, self.n)}"
            )
        if isinstance(self.values, CycloArray):
            if self.values.p != self.field.p:
                raise ContractError("cyclotomic order does not match the field characteristic")
        else:
            object.__setattr__(self, "values", np.asarray(self.values, dtype=np.complex128))
        if self.measure == SURFACE:
            v = self.variety
            if v is None:
                raise ContractError("surface-measure functions need a variety")
            if v.field != self.field or v.n != self.n:
                raise ContractError("variety does not live in this F_q^n")
            if self.backend == "exact":
                object.__setattr__(self, "values", self.values.mask(v.mask))
            else:
                object.__setattr__(self, "values", np.where(v.mask, self.values, 0))

    # construction ------------------------------------------------------
    @classmethod
    def from_array(cls, field, n, values, measure=COUNTING, variety=None, backend="float"):
        values = np.asarray(values)
        if backend == "exact":
            if values.dtype == object:
                vals = CycloArray.from_rationals(field.p, values)
            else:
                vals = CycloArray.from_integers(field.p, values.astype(np.int64))
        elif backend == "float":
            vals = values.astype(np.complex128)
        else:
            raise ContractError(f"unknown backend {backend!r}")
        return cls(field, n, vals, measure, variety)

    @classmethod
    def zeros(cls, field, n, measure=COUNTING, variety=None, backend="float"):
        return cls.from_array(field, n, np.zeros(grid_shape(field, n), dtype=np.int64),
                              measure, variety, backend)

    @classmethod
    def constant(cls, field, n, value=1, measure=COUNTING, variety=None, backend="float"):
        return cls.from_array(field, n, np.full(grid_shape(field, n), value, dtype=np.int64),
                              measure, variety, backend)

    @classmethod
    def delta(cls, field, point, measure=COUNTING, variety=None, backend="float", weight=1):
        n = len(point)
        arr = np.zeros(grid_shape(field, n), dtype=np.int64)
        arr[point_index(field, point)] = weight
        return cls.from_array(field, n, arr, measure, variety, backend)

    @classmethod
    def indicator(cls, field, mask, measure=COUNTING, variety=None, backend="float"):
        mask = np.asarray(mask, dtype=bool)
        return cls.from_array(field, mask.ndim, mask.astype(np.int64), measure, variety, backend)

    # properties --------------------------------------------------------
    @property
    def backend(self) -> str:
        return "exact" if isinstance(self.values, CycloArray) else "float"

    @property
    def shape(self) -> tuple[int, ...]:
        return grid_shape(self.field, self.n)

    @property
    def size(self) -> int:
        return self.field.q**self.n

    def replace(self, values=None, measure=None, variety=None) -> GridFunction:
        return GridFunction(
            self.field,
            self.n,
            self.values if values is None else values,
            self.measure if measure is None else measure,
            self.variety if variety is None else variety,
        )

    def to_complex(self) -> np.ndarray:
        if self.backend == "exact":
            return self.values.to_complex()
        return self.values

    def as_float(self) -> GridFunction:
        return self.replace(values=self.to_complex())

    def as_exact(self, max_denominator: int = 10**6) -> GridFunction:
        """Convert a real, rational-valued float function to the exact backend."""
        if self.backend == "exact":
            return self
        vals = self.values
        if np.max(np.abs(vals.imag), initial=0.0) > 1e-12:
            raise ContractError("only real-valued functions convert to the exact backend")
        fr = np.empty(vals.shape, dtype=object)
        flat = fr.reshape(-1)
        for i, v in enumerate(vals.real.ravel()):
            flat[i] = Fraction(float(v)).limit_denominator(max_denominator)
        back = np.array([float(f) for f in flat], dtype=float).reshape(vals.shape)
        if np.max(np.abs(back - vals.real), initial=0.0) > 1e-12:
            raise ContractError("values are not representable as small rationals")
        return self.replace(values=CycloArray.from_rationals(self.field.p, fr))

    def value(self, point):
        idx = point_index(self.field, point)
        if self.backend == "exact":
            return self.values.value(idx)
        return complex(self.values[idx])

    def _check_compatible(self, other: GridFunction) -> None:
        if not isinstance(other, GridFunction):
            raise ContractError(f"expected a GridFunction, got {type(other).__name__}")
        if other.field != self.field or other.n != self.n:
            raise ContractError("GridFunctions live on different spaces")
        if other.backend != self.backend:
            raise ContractError("GridFunctions use different backends")
        if other.measure != self.measure:
            raise ContractError(f"measure mismatch: {self.measure} vs {other.measure}")

    def __add__(self, other: GridFunction) -> GridFunction:
        self._check_compatible(other)
        return self.replace(values=self.values + other.values)

    def __sub__(self, other: GridFunction) -> GridFunction:
        self._check_compatible(other)
        return self.replace(values=self.values - other.values)

    def __mul__(self, scalar) -> GridFunction:
        if isinstance(scalar, GridFunction):
            self._check_compatible(scalar)
            return self.replace(values=self.values * scalar.values)
        if self.backend == "exact":
            return self.replace(values=self.values * scalar)
        return self.replace(values=self.values * complex(scalar))

    __rmul__ = __mul__

    def equals(self, other: GridFunction, tol: float = 0.0) -> bool:
        self._check_compatible(other)
        if self.backend == "exact":
            return bool(np.all(self.values.equal(other.values)))
        return bool(np.allclose(self.values, other.values, rtol=0, atol=tol))

    # serialisation -----------------------------------------------------
    def to_json(self) -> dict:
        out = {
            "field": self.field.descriptor(),
            "n": self.n,
            "measure": self.measure,
            "variety": None if self.variety is None else self.variety.descriptor(),
            "backend": self.backend,
        }
        if self.backend == "exact":
            nums = self.values.canonical_numerators().reshape(-1, self.field.p - 1)
            den = self.values.denom
            out["values"] = [[str(Fraction(int(c), den)) for c in row] for row in nums]
        else:
            flat = self.values.ravel()
            out["values"] = [[float(z.real), float(z.imag)] for z in flat]
        return out

    @classmethod
    def from_json(cls, data: dict) -> GridFunction:
        fd = data["field"]
        field = make_field(fd["p"], fd["ell"], fd["modulus"] if fd["ell"] > 1 else None)
        n = int(data["n"])
        variety = None
        if data.get("variety"):
            variety = make_variety(data["variety"]["kind"], field, int(data["variety"]["d"]))
        shape = grid_shape(field, n)
        if data["backend"] == "exact":
            rows = [[Fraction(s) for s in row] for row in data["values"]]
            den = math.lcm(*(c.denominator for row in rows for c in row)) if rows else 1
            coeffs = np.zeros((len(rows), field.p), dtype=object)
            for i, row in enumerate(rows):
                for k, c in enumerate(row):
                    coeffs[i, k] = int(c * den)
            arr = CycloArray(field.p, coeffs.reshape(shape + (field.p,)), den)
            arr = CycloArray(field.p, arr.coeffs.astype(np.int64), den) if np.max(
                np.abs(coeffs), initial=0) < 2**62 else arr
            values = arr
        else:
            values = np.array([complex(re, im) for re, im in data["values"]]).reshape(shape)
        return cls(field, n, values, data["measure"], variety)


# ----------------------------------------------------------------------
# character tables
# ----------------------------------------------------------------------


@lru_cache(maxsize=None)
def _trace_matrix(field: Field) -> np.ndarray:
    """T[x, m] = Tr(x m) in 0..p-1."""
    t = field.trace_table[field.mul]
    t.setflags(write=False)
    return t


@lru_cache(maxsize=None)
def _float_matrix(field: Field, sign: int) -> np.ndarray:
    m = np.exp(2j * np.pi * ((sign * _trace_matrix(field)) % field.p) / field.p)
    m.setflags(write=False)
    return m


@lru_cache(maxsize=None)
def _shift_stack(field: Field, sign: int) -> np.ndarray:
    """(p*q, q) stack of 0/1 matrices S_k[x, m] = [sign*Tr(x m) == k mod p]."""
    e = (sign * _trace_matrix(field)) % field.p
    s = np.stack([(e == k) for k in range(field.p)]).astype(np.float64)
    s = s.reshape(field.p * field.q, field.q)
    s.setflags(write=False)
    return s


def _fast_float(values: np.ndarray, field: Field, sign: int, naxes: int | None = None) -> np.ndarray:
    """Character sum along the leading ``naxes`` axes; any trailing axes are batch axes."""
    mat = _float_matrix(field, sign)
    out = values
    for axis in range(values.ndim if naxes is None else naxes):
        out = np.moveaxis(np.tensordot(mat, out, axes=([1], [axis])), 0, axis)
    return out


def _fast_exact(values: CycloArray, field: Field, sign: int) -> CycloArray:
    p, q = field.p, field.q
    stack = _shift_stack(field, sign)
    c = values.coeffs
    n = c.ndim - 1
    for axis in range(n):
        moved = np.moveaxis(c, axis, 0)
        rest = moved.shape[1:]
        flat = moved.reshape(q, -1)
        bound = (int(np.max(np.abs(flat), initial=0)) if flat.dtype != object
                 else max((abs(int(v)) for v in flat.ravel()), default=0)) * q
        if bound < _FLOAT_EXACT:
            prod = np.rint(stack @ flat.astype(np.float64)).astype(np.int64)
        else:
            prod = stack.astype(np.int64).astype(object) @ flat.astype(object)
        prod = prod.reshape((p, q) + rest)
        out = prod[0].copy()
        for k in range(1, p):
            out += np.roll(prod[k], k, axis=-1)
        c = np.moveaxis(out, 0, axis)
    return CycloArray(p, np.ascontiguousarray(c), values.denom)


def _character_sum(values, field: Field, sign: int):
    """sum_m chi(sign * x.m) v(m) for every x, fast axis-wise path."""
    if isinstance(values, CycloArray):
        return _fast_exact(values, field, sign)
    return _fast_float(values, field, sign)


def naive_character_sum(values, field: Field, n: int, sign: int):
    """Quadratic-cost oracle: builds every dot product x.m in the field, then sums."""
    shape = grid_shape(field, n)
    pts = np.stack(np.unravel_index(np.arange(field.q**n), shape), axis=1)
    dots = dot_table(field, pts[:, None, :], pts[None, :, :])
    expo = (sign * field.trace_table[dots]) % field.p
    if isinstance(values, CycloArray):
        flat = values.coeffs.reshape(-1, field.p)
        out = np.zeros_like(flat)
        for x in range(flat.shape[0]):
            for m in range(flat.shape[0]):
                out[x] += np.roll(flat[m], int(expo[x, m]))
        return CycloArray(field.p, out.reshape(shape + (field.p,)), values.denom)
    w = np.exp(2j * np.pi * expo / field.p)
    return (w @ values.reshape(-1)).reshape(shape)


def _scale(values, r: Fraction):
    if isinstance(values, CycloArray):
        return values.scale(r)
    return values * float(r)


# ----------------------------------------------------------------------
# public transforms
# ----------------------------------------------------------------------


def fourier_forward(g: GridFunction, naive: bool = False) -> GridFunction:
    """g -> g^ with g^(x) = sum_m chi(-x.m) g(m); result carries the normalised measure."""
    if g.measure != COUNTING:
        raise ContractError(f"fourier_forward expects a counting-measure function, got {g.measure}")
    if naive:
        vals = naive_character_sum(g.values, g.field, g.n, -1)
    else:
        vals = _character_sum(g.values, g.field, -1)
    return GridFunction(g.field, g.n, vals, NORMALIZED)


def inverse_vs_measure(f: GridFunction, measure: str | None = None,
                       naive: bool = False) -> GridFunction:
    """(f dmu)^v for mu = dx (normalised) or dsigma (surface measure of ``f.variety``)."""
    if measure is not None and measure != f.measure:
        raise ContractError(f"function is tagged {f.measure!r} but measure {measure!r} was requested")
    if f.measure == NORMALIZED:
        norm = Fraction(1, f.size)
    elif f.measure == SURFACE:
        norm = Fraction(1, f.variety.size)
    else:
        raise ContractError("inverse transforms integrate against dx or dsigma, not dm")
    if naive:
        vals = naive_character_sum(f.values, f.field, f.n, +1)
    else:
        vals = _character_sum(f.values, f.field, +1)
    return GridFunction(f.field, f.n, _scale(vals, norm), COUNTING)


# ----------------------------------------------------------------------
# convolution over the additive group (Z/p)^(n*ell)
# ----------------------------------------------------------------------


def _group_shape(field: Field, n: int) -> tuple[int, ...]:
    return (field.p,) * (n * field.ell)


def _fft_convolve_float(a: np.ndarray, b: np.ndarray, field: Field, n: int) -> np.ndarray:
    gs = _group_shape(field, n)
    fa = np.fft.fftn(a.reshape(gs))
    fb = np.fft.fftn(b.reshape(gs))
    return np.fft.ifftn(fa * fb).reshape(grid_shape(field, n))


def _exact_convolve(a: CycloArray, b: CycloArray, field: Field, n: int) -> CycloArray:
    """Group-ring convolution; the coefficient axis is one more cyclic Z/p factor."""
    p = field.p
    gs = _group_shape(field, n) + (p,)
    ca, cb = a.coeffs, b.coeffs
    l1 = int(np.sum(np.abs(ca.astype(object) if ca.dtype == object else ca)))
    mx = int(np.max(np.abs(cb), initial=0))
    if l1 * mx < 2**40:
        fa = np.fft.fftn(ca.astype(np.float64).reshape(gs))
        fb = np.fft.fftn(cb.astype(np.float64).reshape(gs))
        raw = np.fft.ifftn(fa * fb).real
        out = np.rint(raw)
        if np.max(np.abs(raw - out), initial=0.0) > 0.25:
            raise ArithmeticError("FFT convolution lost exactness")
        coeffs = out.astype(np.int64).reshape(a.coeffs.shape)
        return CycloArray(p, coeffs, a.denom * b.denom)
    return _direct_convolve(a, b, field, n)


def _direct_convolve(a, b, field: Field, n: int):
    """sum over supp(a) of a(m') * b(. - m'); exact fallback for huge magnitudes."""
    shape = grid_shape(field, n)
    if isinstance(a, CycloArray):
        support = np.argwhere(~a.is_zero())
        out = CycloArray.zeros(field.p, shape)
    else:
        support = np.argwhere(a != 0)
        out = np.zeros(shape, dtype=np.complex128)
    for mp in support:
        idx = np.ix_(*[field.sub[:, int(c)] for c in mp])
        if isinstance(a, CycloArray):
            shifted = CycloArray(field.p, b.coeffs[idx], b.denom)
            out = out + shifted * a.value(tuple(int(c) for c in mp))
        else:
            out = out + a[tuple(mp)] * b[idx]
    return out


def convolve_counting(g1: GridFunction, g2: GridFunction) -> GridFunction:
    """(g1 * g2)(m) = sum_m' g1(m - m') g2(m') on (F_q^n, dm)."""
    g1._check_compatible(g2)
    if g1.measure != COUNTING:
        raise ContractError("convolve_counting expects counting-measure functions")
    if g1.backend == "exact":
        vals = _exact_convolve(g1.values, g2.values, g1.field, g1.n)
    else:
        vals = _fft_convolve_float(g1.values, g2.values, g1.field, g1.n)
    return g1.replace(values=vals)


def convolve_normalized(f1: GridFunction, f2: GridFunction) -> GridFunction:
    """(f1 * f2)(x) = q^-n sum_y f1(x - y) f2(y) on (F_q^n, dx)."""
    f1._check_compatible(f2)
    if f1.measure != NORMALIZED:
        raise ContractError("convolve_normalized expects normalised-measure functions")
    norm = Fraction(1, f1.size)
    if f1.backend == "exact":
        vals = _exact_convolve(f1.values, f2.values, f1.field, f1.n).scale(norm)
    else:
        vals = _fft_convolve_float(f1.values, f2.values, f1.field, f1.n) * float(norm)
    return f1.replace(values=vals)


def inner_product(a: GridFunction, b: GridFunction):
    """<a, b> = sum a * conj(b) against the shared measure (dm, dx or dsigma)."""
    a._check_compatible(b)
    if a.measure == COUNTING:
        w = Fraction(1)
    elif a.measure == NORMALIZED:
        w = Fraction(1, a.size)
    else:
        w = Fraction(1, a.variety.size)
    if a.backend == "exact":
        total = (a.values * b.values.conj()).sum()
        return total * w
    return complex(np.sum(a.values * np.conj(b.values))) * float(w)


def exact_value_to_complex(v) -> complex:
    return v.to_complex() if isinstance(v, CycloValue) else complex(v)
