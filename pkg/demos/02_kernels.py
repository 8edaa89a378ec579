"""
Splitting the transform into kernels
====================================

(dsigma)^v = delta_0 + K_1 + ... + K_5, one kernel per Omega class.  Two of
the kernels vanish, and the Fourier transforms of the others are small
combinations of indicator sums.
"""

from __future__ import annotations

from flatlab import field_of_order
from flatlab.oracle import decay_profile, kernel_stats, verify_kernels

for q, d in [(5, 2), (7, 2), (3, 3)]:
    field = field_of_order(q)
    print(f"--- q={q}, d={d}")
    for j in range(1, 6):
        st = kernel_stats(j, field, d)
        print(f"K_{j}: sup|K|^2 = {st['sup_abs2']!s:>8}   sup|K^| = {st['sup_hat_abs']:.3f}")
    print("bounds: 2q =", 2 * q, " 4q^2 =", 4 * q * q)
    print(verify_kernels(field, d).summary())
    print(decay_profile(field, d).summary())
