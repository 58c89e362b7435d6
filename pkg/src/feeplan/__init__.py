"""Profit-maximizing fee assignment for payment-channel networks."""

from .core import (
    ChannelGraph,
    ProfitReport,
    RoutingDecision,
    TransactionMatrix,
    cheapest_path,
    evaluate_profit,
    validate_matrix,
)
from .oracle import SearchConfig, cndf_brute_force, enumerate_connected_graphs
from .path_opt import (
    PathInstance,
    PathSolution,
    brute_force_path,
    build_usage_tensor,
    maximal_intervals,
    optimize_path,
    zero_one_round,
)
from .star_opt import build_star, certify_near_optimality, connected_upper_bound, star_profit
from .tree_opt import TreeInstance, build_lp, optimize_tree, solve_lp

__version__ = "0.1.0"
