"""Exhaustive search over labeled graphs and grid fee vectors (tiny n only).

Fees are drawn from ``{0, 1/q, ..., 1}``. Internally every fee is the integer
``q * fee``. All-pairs cheapest costs are built edge by edge for whole blocks
of fee vectors at once (saturating at ``q + 1``), so the integer test
``cost <= q`` is exact. The winning candidate is re-scored with
:func:`feeplan.core.evaluate_profit`.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Iterator, Sequence

import numpy as np

from .core import ChannelGraph, Edge, TransactionMatrix, evaluate_profit

MAX_ORACLE_N = 6
BLOCK = 1 << 17


class SearchCapError(ValueError):
    pass


@dataclass(frozen=True)
class SearchConfig:
    max_n: int = 5
    grid_q: int = 4
    connected_only: bool = False

    def __post_init__(self):
        if not 1 <= self.max_n <= MAX_ORACLE_N:
            raise SearchCapError(f"max_n must be in 1..{MAX_ORACLE_N}, got {self.max_n}")
        if self.grid_q < 1:
            raise SearchCapError(f"grid_q must be >= 1, got {self.grid_q}")


@dataclass(frozen=True)
class OracleResult:
    graph: ChannelGraph
    fees: tuple[Fraction, ...]
    profit: Fraction
    # fee vectors scored; depends on pruning order, so not part of equality
    candidates: int = field(default=0, compare=False)

    @property
    def edges(self) -> tuple[Edge, ...]:
        return self.graph.edges


def is_connected(n: int, edges: Iterable[Edge]) -> bool:
    adj = [0] * (n + 1)
    for u, v in edges:
        adj[u] |= 1 << v
        adj[v] |= 1 << u
    seen, frontier = 1 << 1, 1 << 1
    while frontier:
        nxt = 0
        for v in range(1, n + 1):
            if frontier >> v & 1:
                nxt |= adj[v]
        frontier = nxt & ~seen
        seen |= nxt
    return seen == ((1 << (n + 1)) - 2)


def enumerate_graphs(n: int, connected_only: bool = False) -> Iterator[tuple[Edge, ...]]:
    """Edge sets on vertices 1..n ordered by size, then lexicographically."""
    if n > MAX_ORACLE_N:
        raise SearchCapError(f"n={n} exceeds enumeration cap {MAX_ORACLE_N}")
    slots = list(combinations(range(1, n + 1), 2))
    for m in range(len(slots) + 1):
        for edges in combinations(slots, m):
            if not connected_only or is_connected(n, edges):
                yield edges


def enumerate_connected_graphs(n: int) -> Iterator[tuple[Edge, ...]]:
    return enumerate_graphs(n, connected_only=True)


def _insert_edge(D: np.ndarray, u: int, v: int, q: int) -> np.ndarray:
    """Add edge (u, v) to every APSP matrix in ``D`` at each fee 0..q.

    A cheapest path crosses a new edge at most once, so one relaxation pass
    is exact. Output rows are ordered ``old_row * (q + 1) + fee``.
    """
    cap = q + 1
    a = D[:, :, u, None] + D[:, None, v, :]
    b = D[:, :, v, None] + D[:, None, u, :]
    via = np.minimum(a, b)
    out = np.empty((D.shape[0], q + 1) + D.shape[1:], dtype=D.dtype)
    for f in range(q + 1):
        np.minimum(D, np.minimum(via + f, cap), out=out[:, f])
    return out.reshape((-1,) + D.shape[1:])


def _final_scores(D, u, v, q, iu, ju, w):
    """Revenue per (row, fee) for the last edge without materializing APSP."""
    base = D[:, iu, ju]
    via = np.minimum(D[:, iu, u] + D[:, v, ju], D[:, iu, v] + D[:, u, ju])
    out = np.empty((D.shape[0], q + 1), dtype=np.int64)
    for f in range(q + 1):
        cost = np.minimum(base, via + f).astype(np.int64)
        cost[cost > q] = 0
        out[:, f] = cost @ w
    return out.reshape(-1)


def grid_scores(n: int, edges: Sequence[Edge], weights: np.ndarray, q: int) -> Iterator[np.ndarray]:
    """Revenue (in 1/q units) of every fee vector on ``{0..q}^m``, in blocks.

    Blocks come in lexicographic order of fee vectors (first edge most
    significant). ``weights`` is the 0-indexed upper-triangular demand array.
    """
    iu, ju = np.nonzero(weights)
    w = weights[iu, ju].astype(np.int64)
    m = len(edges)
    D0 = np.full((1, n, n), q + 1, dtype=np.int16)
    D0[:, np.arange(n), np.arange(n)] = 0
    if m == 0:
        yield np.zeros(1, dtype=np.int64)
        return

    def walk(D, k):
        u, v = edges[k][0] - 1, edges[k][1] - 1
        if k == m - 1:
            if iu.size == 0:
                yield np.zeros(D.shape[0] * (q + 1), dtype=np.int64)
            else:
                yield _final_scores(D, u, v, q, iu, ju, w)
            return
        if D.shape[0] * (q + 1) > BLOCK:
            for s in range(0, D.shape[0], max(1, BLOCK // (q + 1))):
                yield from walk(D[s:s + max(1, BLOCK // (q + 1))], k)
            return
        yield from walk(_insert_edge(D, u, v, q), k + 1)

    yield from walk(D0, 0)


def _unrank(code: int, m: int, q: int) -> tuple[int, ...]:
    digits = []
    for _ in range(m):
        code, r = divmod(code, q + 1)
        digits.append(r)
    return tuple(reversed(digits))


def _search(n, graphs, weights, q, total_units):
    """Sequential search; returns (score, edges, fee_units, candidates)."""
    best = None
    count = 0
    for edges in graphs:
        m = len(edges)
        # profit can't exceed total demand minus m; skip if a strict gain is impossible
        if best is not None and total_units - m * q <= best[0]:
            continue
        offset = 0
        for rev in grid_scores(n, edges, weights, q):
            r = int(np.argmax(rev))
            score = int(rev[r]) - m * q
            if best is None or score > best[0]:
                best = (score, edges, _unrank(offset + r, m, q))
            offset += rev.size
        count += offset
    return best, count


def cndf_brute_force(
    t: TransactionMatrix,
    cfg: SearchConfig = SearchConfig(),
    graphs: Iterable[Sequence[Edge]] | None = None,
    workers: int = 1,
) -> OracleResult:
    """Best (graph, grid fees) for demand ``t`` by exhaustive search.

    Ties go to fewer edges, then the lexicographically smaller edge set, then
    the lexicographically smaller fee vector. ``graphs`` restricts the search
    to the given edge sets. The result is a lower bound on the true optimum
    whenever the optimum needs fees off the grid.
    """
    n, q = t.n, cfg.grid_q
    if n > cfg.max_n:
        raise SearchCapError(f"n={n} exceeds max_n={cfg.max_n}")
    if graphs is None:
        pool = list(enumerate_graphs(n, cfg.connected_only))
    else:
        pool = sorted({tuple(sorted((min(e), max(e)) for e in g)) for g in graphs}, key=lambda g: (len(g), g))
        if cfg.connected_only:
            pool = [g for g in pool if is_connected(n, g)]
    if not pool:
        raise SearchCapError("no candidate graphs")
    weights = np.triu(np.array(t.entries, dtype=np.int64), k=1)
    total_units = int(weights.sum()) * q
    if workers <= 1:
        best, count = _search(n, pool, weights, q, total_units)
    else:
        parts = [pool[w::workers] for w in range(workers)]
        with ThreadPoolExecutor(workers) as ex:
            results = list(ex.map(lambda p: _search(n, p, weights, q, total_units), parts))
        # total order on candidates, independent of arrival order
        found = [r for r, _ in results if r is not None]
        best = min(found, key=lambda b: (-b[0], len(b[1]), b[1], b[2]))
        count = sum(c for _, c in results)
    score, edges, fee_units = best
    fees = tuple(Fraction(u, q) for u in fee_units)
    graph = ChannelGraph(n, dict(zip(edges, fees)))
    profit = Fraction(score, q)
    check = evaluate_profit(graph, t).profit
    if check != profit:
        raise AssertionError(f"grid scorer gave {profit}, evaluator gives {check}")
    return OracleResult(graph, fees, profit, count)
