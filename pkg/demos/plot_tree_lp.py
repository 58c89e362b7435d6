"""
Serve-all fees on a tree
========================

If every transaction must stay off-chain, the fee problem on a tree is a
linear program. Optima can be fractional: three leaves that all talk to
each other through a centre share the unit fee budget evenly.
"""

from feeplan.core import TransactionMatrix
from feeplan.tree_opt import TreeInstance, build_lp, grid_max, optimize_tree

t = TransactionMatrix.from_pairs(4, {(1, 2): 1, (1, 3): 1, (2, 3): 1})
inst = TreeInstance(t, ((1, 4), (2, 4), (3, 4)))

model = build_lp(inst)
print("objective:", model.objective)
print("rows:", model.rows)

sol = optimize_tree(inst)
print("fees:", [str(f) for f in sol.fees])
print("revenue:", sol.revenue, "profit:", sol.profit)
print("dual certificate:", [str(y) for y in sol.lp.row_duals], "value", sol.lp.dual_value)

# no grid vector does better
best, units = grid_max(model, 10)
print("best on the 1/10 grid:", best / 10, units)
