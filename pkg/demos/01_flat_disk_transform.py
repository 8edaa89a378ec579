"""
The flat disk and its Fourier transform
=======================================

Build F_9, the flat disk inside F_9^4, and compare the closed-form
transform of its surface measure with the brute-force transform.
"""

from __future__ import annotations

from collections import Counter

import numpy as np

from flatlab import field_of_order, flat_disk
from flatlab.oracle import modulus_profile, sigma_ft_brute, sigma_ft_closed, verify_sigma_ft
from flatlab.varieties import omega_class_sizes

# F_9 is built as F_3[t]/(t^2+1); elements are indexed by their coefficients
field = field_of_order(9)
print(field, "eta(-1) =", field.eta_minus_one())

# the flat disk {(a, a.a, b, a.b)} sits in F_9^4 with q^(2d-2) points
disk = flat_disk(field, 2)
print("points on the disk:", disk.size, "of", 9**4)

# a single value of (dsigma)^v, exact in Q(zeta_3)
m = (1, 2, 0, 4)
print("closed form at", m, "=", sigma_ft_closed(field, m))
print("brute force at", m, "=", sigma_ft_brute(field, 2).values.value(m))

# the full comparison over all of F_9^4
report = verify_sigma_ft(field, 2)
print(report.summary())

# how big is the transform on each Omega class?
sizes = omega_class_sizes(9, 2)
for j, moduli in modulus_profile(field, 2).items():
    print(f"Omega_{j}: {sizes[j]:5d} points, |sigma^v|^2 in {sorted(str(v) for v in moduli)}")

# floating-point view of the same data
values = np.abs(sigma_ft_brute(field, 2).values.to_complex()).ravel()
print("distinct moduli:", Counter(np.round(values, 12)).most_common())
