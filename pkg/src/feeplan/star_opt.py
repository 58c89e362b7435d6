"""Payment-hub star: every participant opens one channel to an extra hub vertex.

With fee 1/2 on every spoke, each pair of participants routes through the
hub at cost exactly 1, so every demanded transaction is served. Any
connected network has at least ``n - 1`` channels, which puts the star
within one unit of the best connected profit.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core import ChannelGraph, TransactionMatrix, evaluate_profit
from .oracle import SearchConfig, cndf_brute_force

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class StarNetwork:
    graph: ChannelGraph
    hub: int

    @property
    def n(self) -> int:
        return self.hub - 1


def build_star(n: int) -> StarNetwork:
    if n < 1:
        raise ValueError("star needs at least one participant")
    hub = n + 1
    return StarNetwork(ChannelGraph(hub, {(i, hub): HALF for i in range(1, n + 1)}), hub)


def star_profit(t: TransactionMatrix) -> Fraction:
    return Fraction(t.total_demand() - t.n)


def evaluate_star(t: TransactionMatrix):
    """Score the star through the general evaluator (hub padded with zero demand)."""
    star = build_star(t.n)
    return evaluate_profit(star.graph, t.padded(star.hub))


def connected_upper_bound(t: TransactionMatrix) -> Fraction:
    """Profit ceiling for any connected network: all demand at fee 1, n - 1 channels."""
    return Fraction(t.total_demand() - (t.n - 1))


@dataclass(frozen=True)
class NearOptimality:
    star_profit: Fraction
    upper_bound: Fraction
    gap: Fraction


def certify_near_optimality(t: TransactionMatrix) -> NearOptimality:
    sp = star_profit(t)
    ub = connected_upper_bound(t)
    gap = ub - sp
    if gap > 1:
        raise AssertionError(f"gap {gap} exceeds 1")
    return NearOptimality(sp, ub, gap)


@dataclass(frozen=True)
class EmpiricalCheck:
    star_profit: Fraction
    oracle_profit: Fraction
    holds: bool
    oracle_edges: tuple


def empirical_check(t: TransactionMatrix, grid_q: int = 4, workers: int = 1) -> EmpiricalCheck:
    """Compare the star against the best connected network found on the fee grid.

    Only meaningful for tiny ``n``; the oracle result is a grid lower bound on
    the connected optimum.
    """
    cfg = SearchConfig(max_n=max(t.n, 1), grid_q=grid_q, connected_only=True)
    best = cndf_brute_force(t, cfg, workers=workers)
    sp = star_profit(t)
    return EmpiricalCheck(sp, best.profit, sp >= best.profit - 1, best.edges)
