"""
The Kakeya maximal operator
===========================

h*(v) is the largest sum of |h| along a line with direction v.  Point
masses, constants and single lines give exact answers; the ratio
||h*||_{L^d} / ||h||_{L^d} stays small on every test input.
"""

from __future__ import annotations

from flatlab import field_of_order
from flatlab.normlab import kakeya_lower_bound, kakeya_maximal, kakeya_ratio, kakeya_test_inputs

for d in (2, 3):
    for q in (3, 5, 7):
        field = field_of_order(q)
        inputs = kakeya_test_inputs(field, d)
        line_star = kakeya_maximal(inputs["single_line"]).values.real.ravel()
        ratios = {name: kakeya_ratio(h, d, d) for name, h in inputs.items()}
        best, name = kakeya_lower_bound(field, d, d, d)
        print(f"d={d} q={q}: single line h* takes values {sorted(set(line_star.tolist()))}; "
              f"best ratio {best:.4f} from {name}")
        print("    ", {k: round(v, 4) for k, v in ratios.items()})
