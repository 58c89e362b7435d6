"""Optimal 0/1 fee assignment on path networks.

Nodes are ``1..n`` in line order and edge ``k`` joins nodes ``k`` and ``k+1``.
A transaction ``(u, v)`` with ``u < v`` uses edges ``u..v-1``; under a fee-1
set ``K`` (all other fees 0) it pays 1 iff it crosses exactly one edge of K.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

import numpy as np

from .core import ChannelGraph, TransactionMatrix

MAX_BRUTE_FORCE_EDGES = 24


class InstanceTooLargeError(ValueError):
    pass


@dataclass(frozen=True)
class PathInstance:
    t: TransactionMatrix

    @property
    def n(self) -> int:
        return self.t.n

    @property
    def m(self) -> int:
        return self.t.n - 1

    def demand_array(self) -> np.ndarray:
        """``(n+1, n+1)`` int64 array, 1-indexed, upper triangle only."""
        arr = np.zeros((self.n + 1, self.n + 1), dtype=np.int64)
        arr[1:, 1:] = np.triu(np.array(self.t.entries, dtype=np.int64), k=1)
        return arr

    def graph(self, fee_one_edges) -> ChannelGraph:
        chosen = set(fee_one_edges)
        return ChannelGraph.path([1 if k in chosen else 0 for k in range(1, self.m + 1)])


@dataclass(frozen=True)
class PathSolution:
    fee_one_edges: tuple[int, ...]
    revenue: int
    profit: Fraction

    def fees(self, m: int) -> list[int]:
        chosen = set(self.fee_one_edges)
        return [1 if k in chosen else 0 for k in range(1, m + 1)]


@dataclass
class PathPlan:
    """DP artifacts. Arrays are 1-indexed; index 0 is unused padding."""

    usage: np.ndarray
    table: np.ndarray
    backtrack: np.ndarray
    solution: PathSolution
    sets: dict = field(default_factory=dict, repr=False)


def build_usage_tensor(inst: PathInstance) -> np.ndarray:
    """Tensor ``M[i, j, k]``: demand contained in edges ``[i, k]`` that crosses edge ``j``.

    The sum is the rectangle ``u in [i, j], v in [j+1, k+1]`` of T, read off a
    2-D prefix sum so the whole tensor costs O(m^3). Entries with ``i > j`` or
    ``j > k`` are zero.
    """
    m = inst.m
    M = np.zeros((m + 1, m + 1, m + 1), dtype=np.int64)
    if m < 1:
        return M
    T = inst.demand_array()
    # C[a, b] = sum of T[u, v] for u <= a, v <= b
    C = T.cumsum(axis=0).cumsum(axis=1)
    idx = np.arange(1, m + 1)
    i = idx[:, None, None]
    j = idx[None, :, None]
    k = idx[None, None, :]
    rect = C[j, k + 1] - C[i - 1, k + 1] - C[j, j] + C[i - 1, j]
    valid = (i <= j) & (j <= k)
    M[1:, 1:, 1:] = np.where(valid, rect, 0)
    return M


def _better(rev: int, ks: tuple, best_rev: int, best_ks: tuple) -> bool:
    if rev != best_rev:
        return rev > best_rev
    if len(ks) != len(best_ks):
        return len(ks) < len(best_ks)
    return ks < best_ks


def solve_path(inst: PathInstance) -> PathPlan:
    """Run the interval DP and keep its table, usage tensor and predecessors.

    ``P[x, y]`` is the best revenue from transactions inside edges ``1..y``
    over fee-1 sets whose largest edge is ``x``. Either ``x`` is the only
    fee-1 edge, or the previous one is ``lastX`` and the transactions
    crossing ``x`` must stay right of ``lastX``.
    """
    m = inst.m
    if m < 1:
        raise ValueError("path needs at least one edge")
    M = build_usage_tensor(inst)
    Ml = M.tolist()
    P = [[0] * (m + 1) for _ in range(m + 1)]
    back = [[0] * (m + 1) for _ in range(m + 1)]
    sets: dict[tuple[int, int], tuple[int, ...]] = {}
    for x in range(1, m + 1):
        for y in range(x, m + 1):
            best, best_ks, best_last = Ml[1][x][y], (x,), 0
            for last in range(1, x):
                rev = P[last][x - 1] + Ml[last + 1][x][y]
                if rev < best:
                    continue
                ks = sets[last, x - 1] + (x,)
                if _better(rev, ks, best, best_ks):
                    best, best_ks, best_last = rev, ks, last
            P[x][y] = best
            back[x][y] = best_last
            sets[x, y] = best_ks
    # Every set with largest edge x is represented in column y = m.
    rev, ks = 0, ()
    for x in range(1, m + 1):
        if _better(P[x][m], sets[x, m], rev, ks):
            rev, ks = P[x][m], sets[x, m]
    sol = PathSolution(ks, rev, Fraction(rev - m))
    return PathPlan(M, np.array(P, dtype=np.int64), np.array(back, dtype=np.int64), sol, sets)


def backtrack(plan: PathPlan, x: int, y: int) -> tuple[int, ...]:
    """Rebuild the fee-1 set behind ``P[x, y]`` from stored predecessors."""
    out = []
    while x:
        out.append(x)
        x, y = int(plan.backtrack[x, y]), x - 1
    return tuple(reversed(out))


def optimize_path(inst: PathInstance) -> PathSolution:
    return solve_path(inst).solution


def path_revenue(t: TransactionMatrix, fee_one_edges) -> int:
    """Revenue of a 0/1 assignment computed straight from the crossing rule."""
    chosen = set(fee_one_edges)
    return sum(d for u, v, d in t.pairs() if sum(1 for k in range(u, v) if k in chosen) == 1)


def brute_force_path(inst: PathInstance) -> PathSolution:
    """Exhaustive search over all ``2**m`` fee-1 sets."""
    m = inst.m
    if m > MAX_BRUTE_FORCE_EDGES:
        raise InstanceTooLargeError(f"m={m} exceeds brute-force cap {MAX_BRUTE_FORCE_EDGES}")
    if m < 1:
        raise ValueError("path needs at least one edge")
    masks = np.arange(1 << m, dtype=np.int64)
    revenue = np.zeros(1 << m, dtype=np.int64)
    for u, v, d in inst.t.pairs():
        span = ((1 << (v - u)) - 1) << (u - 1)
        hit = masks & span
        # exactly one bit set
        revenue += d * ((hit != 0) & ((hit & (hit - 1)) == 0))
    best = int(revenue.max())
    for r in range(m + 1):
        for ks in combinations(range(1, m + 1), r):
            mask = sum(1 << (k - 1) for k in ks)
            if revenue[mask] == best:
                return PathSolution(ks, best, Fraction(best - m))
    raise AssertionError("unreachable")


def maximal_intervals(fees: Sequence) -> list[tuple[int, int]]:
    """Inclusion-maximal edge intervals whose fee sum is at most 1."""
    f = [Fraction(x) for x in fees]
    m = len(f)
    prefix = [Fraction(0)]
    for x in f:
        prefix.append(prefix[-1] + x)

    def total(i, j):
        return prefix[j] - prefix[i - 1]

    out = []
    for i in range(1, m + 1):
        for j in range(i, m + 1):
            if total(i, j) > 1:
                break
            if (i == 1 or total(i - 1, j) > 1) and (j == m or total(i, j + 1) > 1):
                out.append((i, j))
    return out


def zero_one_round(fees: Sequence) -> list[int]:
    """Greedy 0/1 vector hitting every maximal interval of ``fees`` exactly once."""
    S = maximal_intervals(fees)
    f = [0] * (len(fees) + 1)
    for k in range(1, len(fees) + 1):
        if all(sum(f[i:j + 1]) == 0 for i, j in S if i <= k <= j):
            f[k] = 1
    return f[1:]


def grid_revenues(t: TransactionMatrix, q: int, chunk: int = 1 << 20):
    """Yield ``(fee_units, revenue_units)`` blocks over the whole grid ``{0..q}^m``.

    Fees are ``units / q``; revenue is returned in the same units. Used by the
    fractional-dominance checks.
    """
    m = t.n - 1
    pairs = list(t.pairs())
    total = (q + 1) ** m
    for start in range(0, total, chunk):
        codes = np.arange(start, min(total, start + chunk), dtype=np.int64)
        units = np.empty((codes.size, m), dtype=np.int64)
        rest = codes
        for col in range(m - 1, -1, -1):
            units[:, col] = rest % (q + 1)
            rest = rest // (q + 1)
        prefix = np.concatenate([np.zeros((codes.size, 1), dtype=np.int64), units.cumsum(axis=1)], axis=1)
        rev = np.zeros(codes.size, dtype=np.int64)
        for u, v, d in pairs:
            cost = prefix[:, v - 1] - prefix[:, u - 1]
            rev += d * np.where(cost <= q, cost, 0)
        yield units, rev
