"""Finite fields F_q of odd order q = p**ell.

Elements are stored as indices ``0 <= i < q``; the index of the polynomial
``c_0 + c_1 t + ... + c_{ell-1} t^{ell-1}`` is ``sum(c_k * p**k)``.  Index
order is the canonical element order used everywhere in the package, and
it keeps the prime subfield at indices ``0..p-1``.

All arithmetic goes through dense lookup tables built once per field, so
vectorised code can do ``field.mul[a, b]`` on whole index arrays.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np

__all__ = [
    "FieldError",
    "Field",
    "FieldElement",
    "MODULUS_TABLE",
    "make_field",
    "field_of_order",
    "parse_modulus",
    "trace",
    "eta",
    "elements",
]


class FieldError(ValueError):
    """Raised when a field cannot be constructed or an element is out of domain."""


# constant term first, monic leading coefficient last
MODULUS_TABLE: dict[tuple[int, int], tuple[int, ...]] = {
    (3, 2): (1, 0, 1),  # t^2 + 1
    (5, 2): (2, 0, 1),  # t^2 + 2
    (3, 3): (1, 2, 0, 1),  # t^3 + 2t + 1
    (7, 2): (1, 0, 1),  # t^2 + 1
    (11, 2): (1, 0, 1),  # t^2 + 1
    (5, 3): (3, 3, 0, 1),  # t^3 + 3t + 3
    (13, 2): (6, 0, 1),  # t^2 + 6
}


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    k = 3
    while k * k <= n:
        if n % k == 0:
            return False
        k += 2
    return True


def _poly_mod(a: list[int], b: tuple[int, ...], p: int) -> list[int]:
    """Remainder of a by monic b over F_p (coefficient lists, constant first)."""
    a = [c % p for c in a]
    db = len(b) - 1
    for k in range(len(a) - 1, db - 1, -1):
        c = a[k]
        if c:
            for i in range(db + 1):
                a[k - db + i] = (a[k - db + i] - c * b[i]) % p
    return a[:db] if db > 0 else []


def is_irreducible(modulus: tuple[int, ...], p: int) -> bool:
    """Trial division by every monic polynomial of degree <= deg/2."""
    deg = len(modulus) - 1
    if deg <= 0 or modulus[-1] % p != 1:
        return False
    if deg == 1:
        return True
    for k in range(1, deg // 2 + 1):
        for low in itertools.product(range(p), repeat=k):
            divisor = tuple(low) + (1,)
            if not any(_poly_mod(list(modulus), divisor, p)):
                return False
    return True


def parse_modulus(text: str) -> tuple[int, ...]:
    """Parse a CLI modulus like ``"1,0,1"`` (constant term first)."""
    try:
        return tuple(int(tok) for tok in text.split(",") if tok.strip())
    except ValueError as exc:
        raise FieldError(f"invalid modulus {text!r}: {exc}") from None


class Field:
    """The finite field F_{p^ell} with table-driven arithmetic."""

    def __init__(self, p: int, ell: int = 1, modulus: tuple[int, ...] | None = None):
        if not isinstance(p, (int, np.integer)) or p % 2 == 0:
            raise FieldError(f"p={p} must be an odd prime (even characteristic unsupported)")
        if not _is_prime(int(p)):
            raise FieldError(f"p={p} is not prime")
        if ell < 1:
            raise FieldError(f"ell={ell} must be a positive integer")
        p, ell = int(p), int(ell)
        if ell == 1:
            modulus = (0, 1)
        else:
            if modulus is None:
                if (p, ell) not in MODULUS_TABLE:
                    raise FieldError(f"no built-in modulus for q={p}**{ell}; pass one explicitly")
                modulus = MODULUS_TABLE[(p, ell)]
            modulus = tuple(int(c) % p for c in modulus)
            if len(modulus) != ell + 1:
                raise FieldError(f"modulus must have degree {ell}, got {len(modulus) - 1}")
            if modulus[-1] != 1:
                raise FieldError("modulus must be monic")
            if not is_irreducible(modulus, p):
                raise FieldError(f"modulus {modulus} is reducible over F_{p}")
        self.p = p
        self.ell = ell
        self.q = p**ell
        self.modulus = modulus
        self._build_tables()

    def _build_tables(self) -> None:
        p, ell, q = self.p, self.ell, self.q
        idx = np.arange(q)
        coeffs = np.stack([(idx // p**k) % p for k in range(ell)], axis=1)
        weights = p ** np.arange(ell)

        add = ((coeffs[:, None, :] + coeffs[None, :, :]) % p) @ weights
        neg = ((-coeffs) % p) @ weights

        prod = np.zeros((q, q, 2 * ell - 1), dtype=np.int64)
        for i in range(ell):
            for j in range(ell):
                prod[:, :, i + j] += coeffs[:, None, i] * coeffs[None, :, j]
        prod %= p
        mod = np.array(self.modulus, dtype=np.int64)
        for k in range(2 * ell - 2, ell - 1, -1):
            c = prod[:, :, k].copy()
            prod[:, :, k - ell : k + 1] -= c[:, :, None] * mod[None, None, :]
            prod %= p
        mul = prod[:, :, :ell] @ weights

        inv = np.zeros(q, dtype=np.int64)
        rows, cols = np.nonzero(mul == 1)
        inv[rows] = cols

        # Tr(t) = t + t^p + ... + t^(p^(ell-1)); lands in the prime subfield
        tr = idx.copy()
        power = idx.copy()
        for _ in range(ell - 1):
            nxt = power
            for _ in range(p - 1):
                nxt = mul[nxt, power]
            power = nxt
            tr = add[tr, power]
        if np.any(tr >= p):
            raise FieldError("trace left the prime subfield; modulus table is inconsistent")

        eta = -np.ones(q, dtype=np.int64)
        eta[mul[idx, idx]] = 1
        eta[0] = 0

        for name, arr in (
            ("coeffs", coeffs),
            ("add", add),
            ("neg", neg),
            ("mul", mul),
            ("inv", inv),
            ("trace_table", tr),
            ("eta_table", eta),
        ):
            arr = np.ascontiguousarray(arr, dtype=np.int64)
            arr.setflags(write=False)
            setattr(self, name, arr)
        self.sub = self.add[:, self.neg]
        self.sub.setflags(write=False)

    # ------------------------------------------------------------------
    def __repr__(self) -> str:
        if self.ell == 1:
            return f"Field(q={self.q})"
        return f"Field(q={self.q}, p={self.p}, ell={self.ell}, modulus={self.modulus})"

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Field)
            and (self.p, self.ell, self.modulus) == (other.p, other.ell, other.modulus)
        )

    def __hash__(self) -> int:
        return hash((self.p, self.ell, self.modulus))

    def __len__(self) -> int:
        return self.q

    def descriptor(self) -> dict:
        return {"q": self.q, "p": self.p, "ell": self.ell, "modulus": list(self.modulus)}

    def __call__(self, value: int | tuple[int, ...] | FieldElement) -> FieldElement:
        """Coerce an int (into the prime subfield) or a coefficient tuple."""
        if isinstance(value, FieldElement):
            if value.field != self:
                raise FieldError("element belongs to a different field")
            return value
        if isinstance(value, (tuple, list)):
            if len(value) > self.ell:
                raise FieldError(f"too many coefficients for q={self.q}")
            index = sum((int(c) % self.p) * self.p**k for k, c in enumerate(value))
            return FieldElement(self, index)
        return FieldElement(self, int(value) % self.p)

    def element(self, index: int) -> FieldElement:
        if not 0 <= index < self.q:
            raise FieldError(f"index {index} out of range for q={self.q}")
        return FieldElement(self, int(index))

    @property
    def zero(self) -> FieldElement:
        return FieldElement(self, 0)

    @property
    def one(self) -> FieldElement:
        return FieldElement(self, 1)

    def elements(self) -> list[FieldElement]:
        return [FieldElement(self, i) for i in range(self.q)]

    def index_of(self, value: int) -> int:
        """Index of the prime-subfield element ``value mod p``."""
        return int(value) % self.p

    @property
    def minus_one(self) -> int:
        return int(self.neg[1])

    def eta_minus_one(self) -> int:
        return int(self.eta_table[self.minus_one])


class FieldElement:
    __slots__ = ("field", "index")

    def __init__(self, field: Field, index: int):
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "index", index)

    def __setattr__(self, name, value):
        raise AttributeError("FieldElement is immutable")

    @property
    def coeffs(self) -> tuple[int, ...]:
        return tuple(int(c) for c in self.field.coeffs[self.index])

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldError("elements from different fields")
            return other.index
        if isinstance(other, (int, np.integer)):
            return int(other) % self.field.p
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.field, int(self.field.add[self.index, o]))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.field, int(self.field.sub[self.index, o]))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.field, int(self.field.sub[o, self.index]))

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.field, int(self.field.mul[self.index, o]))

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElement(self.field, int(self.field.neg[self.index]))

    def inverse(self) -> FieldElement:
        if self.index == 0:
            raise ZeroDivisionError("0 has no inverse in F_q")
        return FieldElement(self.field, int(self.field.inv[self.index]))

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * FieldElement(self.field, o).inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.field, o) * self.inverse()

    def __pow__(self, k: int) -> FieldElement:
        if k < 0:
            return self.inverse() ** (-k)
        result, base = 1, self.index
        mul = self.field.mul
        while k:
            if k & 1:
                result = int(mul[result, base])
            base = int(mul[base, base])
            k >>= 1
        return FieldElement(self.field, result)

    def __eq__(self, other) -> bool:
        if isinstance(other, FieldElement):
            return self.field == other.field and self.index == other.index
        if isinstance(other, (int, np.integer)):
            return self.index == int(other) % self.field.p
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.field.q, self.index))

    def __bool__(self) -> bool:
        return self.index != 0

    def __int__(self) -> int:
        return self.index

    def __repr__(self) -> str:
        if self.field.ell == 1:
            return f"{self.index}"
        terms = [
            (f"{c}" if k == 0 else f"{'' if c == 1 else c}t" + (f"^{k}" if k > 1 else ""))
            for k, c in enumerate(self.coeffs)
            if c
        ]
        return " + ".join(reversed(terms)) or "0"

    def trace(self) -> int:
        return int(self.field.trace_table[self.index])

    def eta(self) -> int:
        if self.index == 0:
            raise FieldError("eta is defined on F_q^* only")
        return int(self.field.eta_table[self.index])


@lru_cache(maxsize=None)
def _make_field_cached(p: int, ell: int, modulus: tuple[int, ...] | None) -> Field:
    return Field(p, ell, modulus)


def make_field(p: int, ell: int = 1, modulus=None) -> Field:
    """Construct (and cache) F_{p^ell}; ``modulus`` lists coefficients constant-first."""
    if modulus is not None:
        modulus = tuple(int(c) for c in modulus)
    return _make_field_cached(int(p), int(ell), modulus)


def field_of_order(q: int) -> Field:
    """The field with q elements, using the built-in modulus table when q is not prime."""
    for p in range(3, q + 1, 2):
        if _is_prime(p):
            ell, n = 0, q
            while n % p == 0:
                n //= p
                ell += 1
            if n == 1 and ell > 0:
                return make_field(p, ell)
            if ell:
                break
    raise FieldError(f"q={q} is not an odd prime power")


def trace(a: FieldElement) -> int:
    return a.trace()


def eta(a: FieldElement) -> int:
    return a.eta()


def elements(field: Field) -> list[FieldElement]:
    return field.elements()
