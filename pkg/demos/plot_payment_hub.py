"""
The payment-hub star
====================

Adding one hub vertex and charging 1/2 per spoke routes every pair at cost
exactly 1. Its profit is total demand minus n; any connected network earns
at most total demand minus (n - 1).
"""

import numpy as np

from feeplan.core import validate_matrix
from feeplan.star_opt import certify_near_optimality, empirical_check, evaluate_star

rng = np.random.default_rng(5)
for n in (3, 4, 5):
    T = np.triu(rng.integers(0, 10, (n, n)), 1)
    t = validate_matrix((T + T.T).tolist())
    cert = certify_near_optimality(t)
    chk = empirical_check(t, grid_q=4)
    print(
        f"n={n}: star {cert.star_profit}, ceiling {cert.upper_bound}, "
        f"best connected on grid {chk.oracle_profit} via {len(chk.oracle_edges)} channels"
    )
    assert evaluate_star(t).profit == cert.star_profit
