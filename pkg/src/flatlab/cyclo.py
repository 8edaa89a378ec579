"""Exact arithmetic in the cyclotomic field Q(zeta_p).

``CycloValue`` is a single element written in the canonical basis
``1, zeta, ..., zeta^(p-2)`` with rational coefficients, using the relation
``zeta^(p-1) = -(1 + zeta + ... + zeta^(p-2))``.

``CycloArray`` is the vectorised counterpart used by the exact grid
backend.  It keeps *redundant* integer coefficients over all ``p`` powers
``zeta^0 .. zeta^(p-1)`` plus one shared positive denominator, so that
multiplying by a root of unity is an index rotation.  Canonical form is
only produced for comparisons and extraction.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from typing import Iterable

import numpy as np

# int64 products must stay below this before we fall back to Python ints
_INT64_SAFE = 2**62


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, float) and x.is_integer():
        return Fraction(int(x))
    raise TypeError(f"cannot use {x!r} as an exact rational")


def _canonical(p: int, redundant: Iterable) -> tuple[Fraction, ...]:
    red = [Fraction(0)] * p
    for k, c in enumerate(redundant):
        red[k % p] += _frac(c)
    top = red[p - 1]
    return tuple(c - top for c in red[: p - 1])


class CycloValue:
    """Element of Q(zeta_p), p an odd prime, in canonical coordinates."""

    __slots__ = ("p", "coeffs")

    def __init__(self, p: int, coeffs: Iterable = ()):
        coeffs = list(coeffs)
        if len(coeffs) > p - 1:
            canon = _canonical(p, coeffs)
        else:
            canon = tuple(_frac(c) for c in coeffs) + (Fraction(0),) * (p - 1 - len(coeffs))
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "coeffs", canon)

    def __setattr__(self, name, value):
        raise AttributeError("CycloValue is immutable")

    # constructors ------------------------------------------------------
    @classmethod
    def from_redundant(cls, p: int, coeffs: Iterable) -> CycloValue:
        """Build from coefficients of zeta^0, zeta^1, ... (any length; exponents taken mod p)."""
        return cls(p, _canonical(p, coeffs))

    @classmethod
    def rational(cls, p: int, r) -> CycloValue:
        return cls(p, [_frac(r)])

    @classmethod
    def zeta(cls, p: int, k: int = 1) -> CycloValue:
        red = [0] * p
        red[k % p] = 1
        return cls.from_redundant(p, red)

    @classmethod
    def zero(cls, p: int) -> CycloValue:
        return cls(p)

    @classmethod
    def one(cls, p: int) -> CycloValue:
        return cls(p, [1])

    # helpers -----------------------------------------------------------
    def redundant(self) -> list[Fraction]:
        return list(self.coeffs) + [Fraction(0)]

    def _coerce(self, other) -> CycloValue:
        if isinstance(other, CycloValue):
            if other.p != self.p:
                raise ValueError(f"mixing Q(zeta_{self.p}) and Q(zeta_{other.p})")
            return other
        if isinstance(other, (int, np.integer, Fraction)):
            return CycloValue.rational(self.p, other)
        return NotImplemented

    # ring operations ---------------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return CycloValue(self.p, [a + b for a, b in zip(self.coeffs, o.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return CycloValue(self.p, [-a for a in self.coeffs])

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return CycloValue(self.p, [a - b for a, b in zip(self.coeffs, o.coeffs)])

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        p = self.p
        if all(c == 0 for c in o.coeffs[1:]):
            s = o.coeffs[0]
            return CycloValue(p, [a * s for a in self.coeffs])
        out = [Fraction(0)] * p
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(o.coeffs):
                    if b:
                        out[(i + j) % p] += a * b
        return CycloValue.from_redundant(p, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, np.integer, Fraction)):
            s = _frac(other)
            return CycloValue(self.p, [a / s for a in self.coeffs])
        return NotImplemented

    def __pow__(self, k: int) -> CycloValue:
        if k < 0:
            raise ValueError("negative powers are not supported")
        result, base = CycloValue.one(self.p), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conj(self) -> CycloValue:
        red = self.redundant()
        return CycloValue.from_redundant(self.p, [red[(-k) % self.p] for k in range(self.p)])

    def abs2(self) -> CycloValue:
        """v * conj(v); rational whenever |v|^2 lies in Q."""
        return self * self.conj()

    def shift(self, k: int) -> CycloValue:
        """Multiply by zeta^k."""
        red = self.redundant()
        return CycloValue.from_redundant(self.p, [red[(j - k) % self.p] for j in range(self.p)])

    # queries -----------------------------------------------------------
    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    def to_rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self!r} is not rational")
        return self.coeffs[0]

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def to_complex(self) -> complex:
        w = cmath.exp(2j * math.pi / self.p)
        return complex(sum(float(c) * w**k for k, c in enumerate(self.coeffs) if c))

    def __complex__(self) -> complex:
        return self.to_complex()

    def __eq__(self, other) -> bool:
        if isinstance(other, CycloValue):
            return self.p == other.p and self.coeffs == other.coeffs
        if isinstance(other, (int, np.integer, Fraction)):
            return self.is_rational() and self.coeffs[0] == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.p, self.coeffs))

    def __repr__(self) -> str:
        terms = []
        for k, c in enumerate(self.coeffs):
            if c:
                terms.append(f"{c}" if k == 0 else f"({c})*z^{k}")
        return f"CycloValue(p={self.p}: {' + '.join(terms) or '0'})"

    def to_json(self) -> list[str]:
        return [str(c) for c in self.coeffs]

    @classmethod
    def from_json(cls, p: int, data: list[str]) -> CycloValue:
        return cls(p, [Fraction(s) for s in data])


def to_complex(v: CycloValue) -> complex:
    return v.to_complex()


# ----------------------------------------------------------------------
# vectorised exact arrays
# ----------------------------------------------------------------------


def _as_int_array(a) -> np.ndarray:
    a = np.asarray(a)
    if a.dtype == object:
        return a
    if not np.issubdtype(a.dtype, np.integer):
        raise TypeError(f"exact arrays need integer data, got {a.dtype}")
    return a.astype(np.int64, copy=False)


def _maxabs(a: np.ndarray) -> int:
    if a.size == 0:
        return 0
    return int(np.max(np.abs(a)))


def _fit(a: np.ndarray) -> np.ndarray:
    """Move object arrays back to int64 when the values allow it."""
    if a.dtype == object and _maxabs(a) < _INT64_SAFE:
        return a.astype(np.int64)
    return a


class CycloArray:
    """Array of Q(zeta_p) values: ``coeffs[..., k]`` multiplies zeta^k, all over ``denom``."""

    __slots__ = ("p", "coeffs", "denom")

    def __init__(self, p: int, coeffs, denom: int = 1):
        coeffs = _as_int_array(coeffs)
        if coeffs.shape[-1] != p:
            raise ValueError(f"last axis must have length p={p}")
        if denom <= 0:
            raise ValueError("denominator must be positive")
        self.p = p
        self.coeffs = coeffs
        self.denom = int(denom)

    # constructors ------------------------------------------------------
    @classmethod
    def zeros(cls, p: int, shape: tuple[int, ...]) -> CycloArray:
        return cls(p, np.zeros(tuple(shape) + (p,), dtype=np.int64))

    @classmethod
    def from_integers(cls, p: int, values, denom: int = 1) -> CycloArray:
        values = _as_int_array(values)
        c = np.zeros(values.shape + (p,), dtype=values.dtype)
        c[..., 0] = values
        return cls(p, c, denom)

    @classmethod
    def from_rationals(cls, p: int, values) -> CycloArray:
        """Rational-valued array from Fractions/ints (object or numeric array)."""
        flat = [_frac(v) for v in np.asarray(values, dtype=object).ravel()]
        den = math.lcm(*(f.denominator for f in flat)) if flat else 1
        nums = np.array([int(f * den) for f in flat], dtype=object).reshape(np.shape(values))
        return cls.from_integers(p, _fit(nums), den)

    @classmethod
    def monomials(cls, p: int, exponents, weights=None, denom: int = 1) -> CycloArray:
        """Entries ``weights * zeta**exponents``."""
        exponents = np.asarray(exponents) % p
        w = np.ones(exponents.shape, dtype=np.int64) if weights is None else _as_int_array(weights)
        w = np.broadcast_to(w, exponents.shape)
        c = np.zeros(exponents.shape + (p,), dtype=w.dtype)
        np.put_along_axis(c, exponents[..., None], w[..., None], axis=-1)
        return cls(p, c, denom)

    @classmethod
    def full(cls, value: CycloValue, shape: tuple[int, ...]) -> CycloArray:
        den = math.lcm(*(c.denominator for c in value.coeffs))
        red = [int(c * den) for c in value.coeffs] + [0]
        c = np.broadcast_to(np.array(red, dtype=np.int64), tuple(shape) + (value.p,)).copy()
        return cls(value.p, c, den)

    @classmethod
    def stack(cls, arrays: list[CycloArray]) -> CycloArray:
        den = math.lcm(*(a.denom for a in arrays))
        return cls(arrays[0].p, np.stack([a._scaled_coeffs(den // a.denom) for a in arrays]), den)

    # basics ------------------------------------------------------------
    @property
    def shape(self) -> tuple[int, ...]:
        return self.coeffs.shape[:-1]

    def __len__(self) -> int:
        return self.shape[0]

    def copy(self) -> CycloArray:
        return CycloArray(self.p, self.coeffs.copy(), self.denom)

    def reshape(self, *shape) -> CycloArray:
        if len(shape) == 1 and isinstance(shape[0], tuple):
            shape = shape[0]
        return CycloArray(self.p, self.coeffs.reshape(tuple(shape) + (self.p,)), self.denom)

    def __getitem__(self, idx) -> CycloArray | CycloValue:
        if not isinstance(idx, tuple):
            idx = (idx,)
        sub = self.coeffs[idx + (Ellipsis,)] if Ellipsis not in idx else self.coeffs[idx]
        if sub.ndim == 1:
            return CycloValue.from_redundant(
                self.p, [Fraction(int(c), self.denom) for c in sub]
            )
        return CycloArray(self.p, sub, self.denom)

    def value(self, idx) -> CycloValue:
        v = self[idx]
        if not isinstance(v, CycloValue):
            raise IndexError("index does not select a single entry")
        return v

    def _scaled_coeffs(self, factor: int) -> np.ndarray:
        if factor == 1:
            return self.coeffs
        if _maxabs(self.coeffs) * factor >= _INT64_SAFE:
            return self.coeffs.astype(object) * factor
        return self.coeffs * factor

    def reduced(self) -> CycloArray:
        """Divide out the common content of numerators and denominator."""
        canon = self.canonical_numerators()
        g = int(np.gcd.reduce(np.abs(canon).ravel().astype(object))) if canon.size else 0
        g = math.gcd(g, self.denom) if g else self.denom
        if g <= 1:
            return self
        c = self.coeffs.copy()
        c -= c[..., -1:]
        return CycloArray(self.p, _fit(c // g), self.denom // g)

    # arithmetic --------------------------------------------------------
    def _coerce(self, other) -> CycloArray:
        if isinstance(other, CycloArray):
            if other.p != self.p:
                raise ValueError("mixing different cyclotomic fields")
            return other
        if isinstance(other, CycloValue):
            return CycloArray.full(other, ())
        if isinstance(other, (int, np.integer, Fraction)):
            return CycloArray.full(CycloValue.rational(self.p, other), ())
        raise TypeError(f"cannot combine CycloArray with {type(other).__name__}")

    def __add__(self, other) -> CycloArray:
        o = self._coerce(other)
        den = math.lcm(self.denom, o.denom)
        return CycloArray(
            self.p,
            _fit(self._scaled_coeffs(den // self.denom) + o._scaled_coeffs(den // o.denom)),
            den,
        )

    __radd__ = __add__

    def __neg__(self) -> CycloArray:
        return CycloArray(self.p, -self.coeffs, self.denom)

    def __sub__(self, other) -> CycloArray:
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> CycloArray:
        return (-self) + other

    def scale(self, r) -> CycloArray:
        """Multiply by a rational scalar."""
        r = _frac(r)
        num, den = r.numerator, r.denominator
        c = self._scaled_coeffs(abs(num)) if num else np.zeros_like(self.coeffs)
        if num < 0:
            c = -c
        return CycloArray(self.p, _fit(c), self.denom * den)

    def __mul__(self, other) -> CycloArray:
        if isinstance(other, (int, np.integer, Fraction)):
            return self.scale(other)
        o = self._coerce(other)
        p = self.p
        a, b = self.coeffs, o.coeffs
        if _maxabs(a) * _maxabs(b) * p >= _INT64_SAFE:
            a, b = a.astype(object), b.astype(object)
        shape = np.broadcast_shapes(a.shape, b.shape)
        out = np.zeros(shape, dtype=np.result_type(a, b))
        for j in range(p):
            bj = b[..., j : j + 1]
            if np.any(bj):
                out += np.roll(a, j, axis=-1) * bj
        return CycloArray(p, _fit(out), self.denom * o.denom)

    __rmul__ = __mul__

    def mask(self, m) -> CycloArray:
        """Zero the entries where the boolean mask is False."""
        m = np.asarray(m, dtype=bool)
        return CycloArray(self.p, self.coeffs * m[..., None], self.denom)

    def shift(self, k) -> CycloArray:
        """Multiply entrywise by zeta**k (k an int or integer array)."""
        k = np.asarray(k) % self.p
        if k.ndim == 0:
            return CycloArray(self.p, np.roll(self.coeffs, int(k), axis=-1), self.denom)
        j = np.arange(self.p)
        src = (j - k[..., None]) % self.p
        return CycloArray(self.p, np.take_along_axis(self.coeffs, src, axis=-1), self.denom)

    def conj(self) -> CycloArray:
        idx = (-np.arange(self.p)) % self.p
        return CycloArray(self.p, self.coeffs[..., idx], self.denom)

    def abs2(self) -> CycloArray:
        return self * self.conj()

    def sum(self, axis=None) -> CycloArray | CycloValue:
        c = self.coeffs
        if axis is None:
            tot = c.reshape(-1, self.p).sum(axis=0)
            return CycloValue.from_redundant(self.p, [Fraction(int(x), self.denom) for x in tot])
        axis = axis if axis >= 0 else axis + len(self.shape)
        return CycloArray(self.p, c.sum(axis=axis), self.denom)

    # comparisons / extraction -----------------------------------------
    def canonical_numerators(self) -> np.ndarray:
        """Integer canonical coordinates (last axis length p-1), still over ``denom``."""
        return self.coeffs[..., :-1] - self.coeffs[..., -1:]

    def equal(self, other) -> np.ndarray:
        """Entrywise exact equality (boolean array)."""
        o = self._coerce(other)
        a = self.canonical_numerators()
        b = o.canonical_numerators()
        if (_maxabs(a) + 1) * o.denom >= _INT64_SAFE or (_maxabs(b) + 1) * self.denom >= _INT64_SAFE:
            a, b = a.astype(object), b.astype(object)
        return np.all(a * o.denom == b * self.denom, axis=-1)

    def is_zero(self) -> np.ndarray:
        return np.all(self.canonical_numerators() == 0, axis=-1)

    def is_rational(self) -> np.ndarray:
        return np.all(self.canonical_numerators()[..., 1:] == 0, axis=-1)

    def rational_numerators(self) -> np.ndarray:
        """Numerators (over ``denom``) of a rational-valued array."""
        if not np.all(self.is_rational()):
            raise ValueError("array has irrational entries")
        return self.canonical_numerators()[..., 0]

    def to_rationals(self) -> np.ndarray:
        nums = self.rational_numerators()
        out = np.empty(nums.shape, dtype=object)
        flat = out.reshape(-1)
        for i, n in enumerate(nums.reshape(-1)):
            flat[i] = Fraction(int(n), self.denom)
        return out

    def to_complex(self) -> np.ndarray:
        w = np.exp(2j * np.pi * np.arange(self.p) / self.p)
        c = self.coeffs
        if c.dtype == object:
            c = c.astype(np.float64)
        return (c @ w) / self.denom
