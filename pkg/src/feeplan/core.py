"""Instance types, fee-aware cheapest-path routing and the PSP profit function.

Vertices are 1-indexed. Fees and path costs are :class:`fractions.Fraction`
so the "route off-chain iff cost <= 1" test is exact.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

Edge = tuple[int, int]

ONE = Fraction(1)


class MatrixError(ValueError):
    """Base class for transaction-matrix validation failures."""


class NotSquareError(MatrixError):
    pass


class AsymmetricMatrixError(MatrixError):
    pass


class NegativeEntryError(MatrixError):
    pass


class NonzeroDiagonalError(MatrixError):
    pass


class GraphError(ValueError):
    pass


class DimensionMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class TransactionMatrix:
    """Symmetric demand matrix with zero diagonal.

    ``entries`` is stored 0-indexed; use :meth:`demand` for the 1-indexed view.
    """

    n: int
    entries: tuple[tuple[int, ...], ...]

    def demand(self, i: int, j: int) -> int:
        return self.entries[i - 1][j - 1]

    def pairs(self) -> Iterable[tuple[int, int, int]]:
        """Yield ``(i, j, T[i,j])`` for every i<j with positive demand."""
        for i in range(1, self.n + 1):
            row = self.entries[i - 1]
            for j in range(i + 1, self.n + 1):
                if row[j - 1] > 0:
                    yield i, j, row[j - 1]

    def total_demand(self) -> int:
        return sum(d for _, _, d in self.pairs())

    def padded(self, size: int) -> "TransactionMatrix":
        """Extend with zero-demand vertices (used for hub vertices)."""
        if size < self.n:
            raise DimensionMismatchError(f"cannot pad {self.n}x{self.n} matrix down to {size}")
        extra = size - self.n
        rows = [row + (0,) * extra for row in self.entries]
        rows += [(0,) * size for _ in range(extra)]
        return TransactionMatrix(size, tuple(rows))

    def tolist(self) -> list[list[int]]:
        return [list(row) for row in self.entries]

    @classmethod
    def zeros(cls, n: int) -> "TransactionMatrix":
        return cls(n, tuple((0,) * n for _ in range(n)))

    @classmethod
    def from_pairs(cls, n: int, demand: Mapping[Edge, int]) -> "TransactionMatrix":
        grid = [[0] * n for _ in range(n)]
        for (i, j), d in demand.items():
            grid[i - 1][j - 1] = d
            grid[j - 1][i - 1] = d
        return validate_matrix(grid)


def validate_matrix(raw: Sequence[Sequence[int]]) -> TransactionMatrix:
    rows = [list(r) for r in raw]
    n = len(rows)
    if n == 0:
        raise NotSquareError("matrix is empty")
    for r, row in enumerate(rows):
        if len(row) != n:
            raise NotSquareError(f"row {r + 1} has {len(row)} entries, expected {n}")
        for c, v in enumerate(row):
            if isinstance(v, bool) or int(v) != v:
                raise MatrixError(f"entry ({r + 1},{c + 1}) = {v!r} is not an integer")
    for i in range(n):
        if rows[i][i] != 0:
            raise NonzeroDiagonalError(f"diagonal entry ({i + 1},{i + 1}) = {rows[i][i]}")
        for j in range(n):
            if rows[i][j] < 0:
                raise NegativeEntryError(f"entry ({i + 1},{j + 1}) = {rows[i][j]} is negative")
            if rows[i][j] != rows[j][i]:
                raise AsymmetricMatrixError(
                    f"T[{i + 1},{j + 1}] = {rows[i][j]} but T[{j + 1},{i + 1}] = {rows[j][i]}"
                )
    return TransactionMatrix(n, tuple(tuple(int(v) for v in row) for row in rows))


def _as_fee(value) -> Fraction:
    if isinstance(value, float):
        raise GraphError(f"fee {value!r} is a float; pass a Fraction, int or 'p/q' string")
    fee = Fraction(value)
    if not 0 <= fee <= 1:
        raise GraphError(f"fee {fee} outside [0, 1]")
    return fee


def _norm(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


class ChannelGraph:
    """Undirected channel network with one exact fee per edge.

    Instances are immutable; :meth:`with_fees` returns a copy.
    """

    __slots__ = ("vertex_count", "_fees", "_adj")

    def __init__(self, vertex_count: int, fees: Mapping[Edge, object] | Iterable[tuple[Edge, object]]):
        if vertex_count < 1:
            raise GraphError("vertex_count must be positive")
        items = fees.items() if isinstance(fees, Mapping) else fees
        table: dict[Edge, Fraction] = {}
        for (u, v), fee in items:
            if u == v:
                raise GraphError(f"self-loop at vertex {u}")
            if not (1 <= u <= vertex_count and 1 <= v <= vertex_count):
                raise GraphError(f"edge ({u},{v}) has a vertex outside 1..{vertex_count}")
            e = _norm(u, v)
            if e in table:
                raise GraphError(f"duplicate edge {e}")
            table[e] = _as_fee(fee)
        object.__setattr__(self, "vertex_count", vertex_count)
        object.__setattr__(self, "_fees", dict(sorted(table.items())))
        adj: dict[int, list[tuple[int, Fraction]]] = {v: [] for v in range(1, vertex_count + 1)}
        for (u, v), fee in self._fees.items():
            adj[u].append((v, fee))
            adj[v].append((u, fee))
        for lst in adj.values():
            lst.sort()
        object.__setattr__(self, "_adj", adj)

    def __setattr__(self, name, value):
        raise AttributeError("ChannelGraph is immutable")

    @property
    def edges(self) -> tuple[Edge, ...]:
        return tuple(self._fees)

    @property
    def m(self) -> int:
        return len(self._fees)

    @property
    def fees(self) -> dict[Edge, Fraction]:
        return dict(self._fees)

    def fee(self, u: int, v: int) -> Fraction:
        return self._fees[_norm(u, v)]

    def neighbors(self, v: int) -> list[tuple[int, Fraction]]:
        return list(self._adj[v])

    def with_fees(self, fees: Mapping[Edge, object]) -> "ChannelGraph":
        return ChannelGraph(self.vertex_count, fees)

    def __eq__(self, other):
        if not isinstance(other, ChannelGraph):
            return NotImplemented
        return self.vertex_count == other.vertex_count and self._fees == other._fees

    def __hash__(self):
        return hash((self.vertex_count, tuple(self._fees.items())))

    def __repr__(self):
        body = ", ".join(f"{u}-{v}:{f}" for (u, v), f in self._fees.items())
        return f"ChannelGraph({self.vertex_count}, {{{body}}})"

    @classmethod
    def path(cls, fees: Sequence[object]) -> "ChannelGraph":
        """Path 1-2-...-(m+1) with ``fees[k-1]`` on edge (k, k+1)."""
        return cls(len(fees) + 1, {(k, k + 1): f for k, f in enumerate(fees, start=1)})


@dataclass(frozen=True)
class RoutingDecision:
    pair: Edge
    served: bool
    path: tuple[Edge, ...]
    path_cost: Fraction | None
    demand: int = 0


@dataclass(frozen=True)
class ProfitReport:
    decisions: tuple[RoutingDecision, ...]
    revenue: Fraction
    edge_cost: int
    profit: Fraction


def _dijkstra(g: ChannelGraph, source: int) -> dict[int, tuple[Fraction, tuple[int, ...]]]:
    # Labels are (cost, hops, vertex sequence); this order is preserved under
    # extension by an edge, so label-setting yields the tie-broken optimum.
    best: dict[int, tuple[Fraction, tuple[int, ...]]] = {}
    heap: list[tuple[Fraction, int, tuple[int, ...]]] = [(Fraction(0), 0, (source,))]
    while heap:
        cost, hops, seq = heapq.heappop(heap)
        v = seq[-1]
        if v in best:
            continue
        best[v] = (cost, seq)
        for w, fee in g._adj[v]:
            if w not in best:
                heapq.heappush(heap, (cost + fee, hops + 1, seq + (w,)))
    return best


def _edges_of(seq: tuple[int, ...]) -> tuple[Edge, ...]:
    return tuple(_norm(a, b) for a, b in zip(seq, seq[1:]))


def _check_vertex(g: ChannelGraph, v: int) -> None:
    if not 1 <= v <= g.vertex_count:
        raise GraphError(f"vertex {v} outside 1..{g.vertex_count}")


def cheapest_path(g: ChannelGraph, i: int, j: int) -> tuple[tuple[Edge, ...], Fraction] | None:
    """Minimum-fee path from ``i`` to ``j`` or ``None`` if unreachable.

    Among equal-cost paths the one with fewest edges wins, then the
    lexicographically smallest vertex sequence.
    """
    _check_vertex(g, i)
    _check_vertex(g, j)
    if i == j:
        raise GraphError("cheapest_path needs two distinct vertices")
    hit = _dijkstra(g, i).get(j)
    if hit is None:
        return None
    cost, seq = hit
    return _edges_of(seq), cost


def evaluate_profit(g: ChannelGraph, t: TransactionMatrix) -> ProfitReport:
    """Score a network: revenue over unordered pairs served at cost <= 1, minus m."""
    if t.n != g.vertex_count:
        raise DimensionMismatchError(
            f"matrix is {t.n}x{t.n} but graph has {g.vertex_count} vertices"
        )
    decisions = []
    revenue = Fraction(0)
    trees: dict[int, dict] = {}
    for i, j, d in t.pairs():
        if i not in trees:
            trees[i] = _dijkstra(g, i)
        hit = trees[i].get(j)
        if hit is None:
            decisions.append(RoutingDecision((i, j), False, (), None, d))
            continue
        cost, seq = hit
        served = cost <= ONE
        if served:
            revenue += cost * d
        decisions.append(RoutingDecision((i, j), served, _edges_of(seq), cost, d))
    return ProfitReport(tuple(decisions), revenue, g.m, revenue - g.m)
