"""
Replaying the exponent ledger
=============================

Every flat-disk estimate is derived from a paraboloid estimate by exact
rational arithmetic in eps (or in the dimension d), then checked against
the necessary conditions and the conjectured region.
"""

from __future__ import annotations

from flatlab.exponents import EPS, ExponentPair, check_ledger, conjecture_region, derive_ledger, parse_exponent

for est in derive_ledger():
    row = est.row()
    print(f"{row['key']:<18} p = {row['p']:<28} r = {row['r']:<18} [{row['d_constraint']}]")

report = check_ledger()
print(report.summary())
print("Stein-Tomas thresholds:", report.data["stein_tomas"])

# exponents are ordinary objects: compare, substitute, classify
r = parse_exponent("72/(20+5*eps)")
print(r, "at eps=0:", r.at_zero(), " r < 18/5:", r < parse_exponent("18/5"))
pair = ExponentPair.from_pr(2, 4 + EPS)
print(pair, "in dimension 6 is", conjecture_region(pair, 6))
