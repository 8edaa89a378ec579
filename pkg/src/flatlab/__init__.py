"""Finite-field restriction lab for the flat disk.

Exact Fourier analysis on F_q^n, the closed-form transform of the flat
disk's surface measure, kernel bounds, operator-norm lower bounds, the
Kakeya maximal operator and an exact exponent calculus.
"""

__version__ = "0.1.0"

from .field import Field, FieldElement, FieldError, make_field, field_of_order  # noqa: E402
from .cyclo import CycloValue, CycloArray  # noqa: E402
from .characters import chi, gauss_sum, quad_sum  # noqa: E402
from .transform import (  # noqa: E402
    GridFunction,
    fourier_forward,
    inverse_vs_measure,
    convolve_counting,
    convolve_normalized,
)
from .varieties import flat_disk, paraboloid, subspace_H, surface_measure, omega_classify  # noqa: E402

__all__ = [
    "__version__",
    "Field",
    "FieldElement",
    "FieldError",
    "make_field",
    "field_of_order",
    "CycloValue",
    "CycloArray",
    "chi",
    "gauss_sum",
    "quad_sum",
    "GridFunction",
    "fourier_forward",
    "inverse_vs_measure",
    "convolve_counting",
    "convolve_normalized",
    "flat_disk",
    "paraboloid",
    "subspace_H",
    "surface_measure",
    "omega_classify",
]
