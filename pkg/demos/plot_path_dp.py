"""
Optimal fees on a path
======================

On a path every optimal assignment can use fees 0 and 1 only. The interval
DP finds the best fee-1 set in polynomial time; the 2^m enumeration is kept
around as a cross-check.
"""

import time

import numpy as np

from feeplan.core import validate_matrix
from feeplan.path_opt import (
    PathInstance,
    brute_force_path,
    maximal_intervals,
    solve_path,
    zero_one_round,
)

rng = np.random.default_rng(0)
n = 9
T = np.triu(rng.integers(0, 10, (n, n)), 1)
t = validate_matrix((T + T.T).tolist())
inst = PathInstance(t)

plan = solve_path(inst)
print("fee-1 edges:", plan.solution.fee_one_edges)
print("revenue:", plan.solution.revenue, "profit:", plan.solution.profit)
print("brute force revenue:", brute_force_path(inst).revenue)

# P[x, y]: best revenue inside edges 1..y when x is the last fee-1 edge
print(plan.table[1:, 1:])

# fractional fees round to a 0/1 vector that hits every maximal interval once
fees = ["3/10", "1/2", "1/5", "7/10", "1/10"]
print("maximal intervals:", maximal_intervals(fees))
print("0/1 rounding:", zero_one_round(fees))

# runtime grows far slower than the n^5 worst case
for n in (25, 50, 100):
    T = np.triu(rng.integers(0, 10, (n, n)), 1)
    inst = PathInstance(validate_matrix((T + T.T).tolist()))
    start = time.perf_counter()
    solve_path(inst)
    print(f"n={n}: {time.perf_counter() - start:.3f}s")
