"""
Exhaustive network design on tiny instances
===========================================

Every labeled graph and every fee vector on a grid, scored exactly. Handy
for checking the optimizers and for seeing that the best network need not
be a tree.
"""

from feeplan.core import TransactionMatrix
from feeplan.oracle import SearchConfig, cndf_brute_force, enumerate_connected_graphs

print("connected labeled graphs:", [sum(1 for _ in enumerate_connected_graphs(n)) for n in (2, 3, 4, 5)])

t = TransactionMatrix.from_pairs(3, {(1, 2): 10, (1, 3): 10, (2, 3): 10})
best = cndf_brute_force(t, SearchConfig(grid_q=4))
print("heavy triangle:", best.edges, [str(f) for f in best.fees], "profit", best.profit)

# light demand: a single channel is not worth opening
t = TransactionMatrix.from_pairs(2, {(1, 2): 1})
print("one transaction:", cndf_brute_force(t).edges)

t = TransactionMatrix.from_pairs(4, {(1, 2): 6, (2, 3): 1, (3, 4): 6, (1, 4): 2})
best = cndf_brute_force(t, SearchConfig(grid_q=2, connected_only=True))
print("connected optimum:", best.edges, [str(f) for f in best.fees], "profit", best.profit)
