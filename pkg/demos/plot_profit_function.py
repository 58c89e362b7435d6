"""
Scoring a channel network
=========================

A customer routes over the network only when the cheapest fee sum is at
most 1 (the normalized on-chain fee). Each channel costs 1 to open.
"""

from fractions import Fraction

from feeplan import ChannelGraph, cheapest_path, evaluate_profit, validate_matrix

# three participants, ten transactions between every pair
t = validate_matrix([[0, 10, 10], [10, 0, 10], [10, 10, 0]])

# a triangle with fee 1 on every channel: every pair pays 1 on its direct edge
triangle = ChannelGraph(3, {(1, 2): 1, (1, 3): 1, (2, 3): 1})
print("triangle profit:", evaluate_profit(triangle, t).profit)

# a two-channel path with fee 3/5 each: the end-to-end pair pays 6/5 > 1 and goes on-chain
path = ChannelGraph.path([Fraction(3, 5), Fraction(3, 5)])
print("cheapest 1->3 on the path:", cheapest_path(path, 1, 3))
report = evaluate_profit(path, t)
for d in report.decisions:
    print(f"  pair {d.pair}: cost {d.path_cost}, served={d.served}")
print("path profit:", report.profit)

# a cost of exactly 1 still counts as served
edge_case = ChannelGraph.path([Fraction(1, 3), Fraction(2, 3)])
print("1/3 + 2/3 served:", evaluate_profit(edge_case, t).decisions[1].served)
