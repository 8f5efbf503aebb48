"""From a table of path colours to a mean via counting.

A mean of values in [0, 1) becomes a count: compare every value against 2**c
thresholds and count the (path, threshold) pairs where the value wins.
Counting that marked set with a few noisy quantum readouts and a Bayesian MAP
step recovers the mean to within half a threshold step, plus counting error.

    python demos/03_comparator_mean.py
"""
import numpy as np

from qraytrace import CountingConfig, FixedPointFormat, estimate_mean
from qraytrace.estimator import comparator_count, mean_from_count

rng = np.random.default_rng(3)
r, c = 6, 6
fmt = FixedPointFormat(b=0, c=c)
table = rng.beta(2, 5, size=1 << r)

S = comparator_count(table, fmt)
print(f"{1 << r} paths, {fmt.C} comparators, N = {1 << (r + c)} ids")
print(f"true mean           {table.mean():.6f}")
print(f"exact count S = {S:5d} -> {mean_from_count(S, r, fmt):.6f}  (half step = {fmt.step / 2:.6f})")

print("\n t   B   estimate   |error|")
for t in (4, 6, 8, 10):
    for B in (1, 8):
        mean, diag = estimate_mean(table, fmt, CountingConfig(r + c, t, B), np.random.default_rng(t * 10 + B))
        print(f"{t:2d}  {B:2d}   {mean:.6f}   {abs(mean - table.mean()):.2e}")
