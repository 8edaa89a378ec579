"""
Lower bounds for the extension operator
=======================================

Nonlinear power iteration gives certified lower bounds for
||(f dsigma)^v||_{L^r} / ||f||_{L^2(sigma)}.  The values stay bounded as
q grows, and the subspace probe hits ratio 1 at the sharp exponent.
"""

from __future__ import annotations

from fractions import Fraction

from flatlab import field_of_order, flat_disk
from flatlab.normlab import opnorm_lower, probe_closed_form, probe_ratio, subspace_probe_exponent

print("q   lower bound (2 -> 6)   winning start")
for q in (3, 5, 7, 9):
    est = opnorm_lower(flat_disk(field_of_order(q), 2), 6, restarts=8, iters=300, seed=0)
    winner = max(est.starts, key=lambda s: s["ratio"])["start"]
    print(f"{q:<3} {est.best:.6f}             {winner}")

# structured probes have closed-form ratios
field = field_of_order(7)
for probe in ("constant", "subspace_H", "delta"):
    got = probe_ratio(probe, 2, 6, field, 2)
    print(f"{probe:>10}: measured {got:.12f}  closed form {probe_closed_form(probe, 2, 6, 7, 2):.12f}")

# the q-exponent of the subspace probe vanishes at r = (2n+4)/(n-2)
for d in (2, 3, 4):
    n = 2 * d
    sharp = Fraction(2 * n + 4, n - 2)
    print(f"d={d}: sharp r = {sharp}, exponent {subspace_probe_exponent(2, sharp, d)}, "
          f"exponent at r={sharp + 1}: {subspace_probe_exponent(2, sharp + 1, d)}")
