"""Serve-all fee optimization on trees as an exact rational LP.

Every positive-demand pair gets one row ``sum(fees on its path) <= 1`` and
each edge is bounded by ``0 <= x_i <= 1``. The objective weights each edge by
the demand routed over it. The LP is solved with a dense Fraction simplex
using Bland's rule, and the optimal dual is returned as a certificate.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .core import ChannelGraph, Edge, TransactionMatrix, evaluate_profit


class NotATreeError(ValueError):
    pass


class CertificateError(AssertionError):
    pass


@dataclass(frozen=True)
class TreeInstance:
    t: TransactionMatrix
    edges: tuple[Edge, ...]

    def __post_init__(self):
        edges = tuple((u, v) if u < v else (v, u) for u, v in self.edges)
        object.__setattr__(self, "edges", edges)
        check_tree(self.t.n, edges)

    @property
    def n(self) -> int:
        return self.t.n

    def graph(self, fees: Sequence) -> ChannelGraph:
        return ChannelGraph(self.n, dict(zip(self.edges, fees)))


def check_tree(n: int, edges: Sequence[Edge]) -> None:
    if len(set(edges)) != len(edges):
        raise NotATreeError("duplicate edge")
    if len(edges) != n - 1:
        raise NotATreeError(f"a tree on {n} nodes has {n - 1} edges, got {len(edges)}")
    parent = list(range(n + 1))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for u, v in edges:
        if u == v or not (1 <= u <= n and 1 <= v <= n):
            raise NotATreeError(f"bad edge ({u},{v})")
        ru, rv = find(u), find(v)
        if ru == rv:
            raise NotATreeError(f"edge ({u},{v}) closes a cycle")
        parent[ru] = rv


def tree_path_edges(n: int, edges: Sequence[Edge], u: int, v: int) -> list[int]:
    """Indices (into ``edges``) of the unique u-v path, in path order."""
    adj: dict[int, list[tuple[int, int]]] = {x: [] for x in range(1, n + 1)}
    for idx, (a, b) in enumerate(edges):
        adj[a].append((b, idx))
        adj[b].append((a, idx))
    prev: dict[int, tuple[int, int] | None] = {u: None}
    stack = [u]
    while stack:
        x = stack.pop()
        for y, idx in adj[x]:
            if y not in prev:
                prev[y] = (x, idx)
                stack.append(y)
    out = []
    x = v
    while prev[x] is not None:
        x, idx = prev[x]
        out.append(idx)
    return out[::-1]


@dataclass(frozen=True)
class LPModel:
    """maximize ``objective . x`` s.t. ``rows @ x <= 1`` and ``0 <= x <= 1``."""

    objective: tuple[int, ...]
    rows: tuple[tuple[int, ...], ...]
    pairs: tuple[Edge, ...]

    @property
    def m(self) -> int:
        return len(self.objective)


@dataclass(frozen=True)
class LPSolution:
    fees: tuple[Fraction, ...]
    objective_value: Fraction
    # duals for the pair rows, then for the m upper bounds
    row_duals: tuple[Fraction, ...]
    bound_duals: tuple[Fraction, ...]
    pivots: int = 0

    @property
    def dual_value(self) -> Fraction:
        return sum(self.row_duals, Fraction(0)) + sum(self.bound_duals, Fraction(0))


def build_lp(inst: TreeInstance, strict: bool = False) -> LPModel:
    """Objective counts demand per edge; one row per positive-demand pair.

    With ``strict=True`` every pair gets a row, demanded or not.
    """
    m = len(inst.edges)
    c = [0] * m
    rows, pairs = [], []
    for i in range(1, inst.n + 1):
        for j in range(i + 1, inst.n + 1):
            d = inst.t.demand(i, j)
            if d == 0 and not strict:
                continue
            row = [0] * m
            for idx in tree_path_edges(inst.n, inst.edges, i, j):
                row[idx] = 1
                c[idx] += d
            rows.append(tuple(row))
            pairs.append((i, j))
    return LPModel(tuple(c), tuple(rows), tuple(pairs))


def solve_lp(model: LPModel) -> LPSolution:
    """Primal simplex on the slack-form tableau with Bland's rule.

    The right-hand side is all ones, so the slack basis is feasible at x = 0
    and no phase one is needed.
    """
    m = model.m
    A = [list(r) for r in model.rows] + [[1 if j == i else 0 for j in range(m)] for i in range(m)]
    nrows = len(A)
    ncols = m + nrows
    zero, one = Fraction(0), Fraction(1)
    tab = []
    for r, row in enumerate(A):
        slack = [zero] * nrows
        slack[r] = one
        tab.append([Fraction(v) for v in row] + slack + [one])
    # reduced-cost row, stored as c_j - z_j; last cell is -objective
    red = [Fraction(v) for v in model.objective] + [zero] * nrows + [zero]
    basis = list(range(m, m + nrows))
    pivots = 0
    while True:
        enter = next((j for j in range(ncols) if red[j] > 0), None)
        if enter is None:
            break
        leave, best = None, None
        for r in range(nrows):
            a = tab[r][enter]
            if a > 0:
                ratio = tab[r][-1] / a
                if best is None or ratio < best or (ratio == best and basis[r] < basis[leave]):
                    leave, best = r, ratio
        if leave is None:
            raise AssertionError("LP unbounded; cannot happen with 0 <= x <= 1")
        prow = tab[leave]
        piv = prow[enter]
        if piv != 1:
            tab[leave] = prow = [v / piv for v in prow]
        for r in range(nrows):
            if r != leave:
                f = tab[r][enter]
                if f:
                    tab[r] = [a - f * b for a, b in zip(tab[r], prow)]
        f = red[enter]
        red = [a - f * b for a, b in zip(red, prow)]
        basis[leave] = enter
        pivots += 1
    x = [zero] * ncols
    for r, b in enumerate(basis):
        x[b] = tab[r][-1]
    duals = [-red[m + r] for r in range(nrows)]
    sol = LPSolution(
        fees=tuple(x[:m]),
        objective_value=-red[-1],
        row_duals=tuple(duals[: len(model.rows)]),
        bound_duals=tuple(duals[len(model.rows):]),
        pivots=pivots,
    )
    verify_certificate(model, sol)
    return sol


def verify_certificate(model: LPModel, sol: LPSolution) -> None:
    """Raise :class:`CertificateError` unless ``sol`` is provably optimal.

    Checks primal feasibility, dual feasibility (``y >= 0``,
    ``A^T y >= c``) and equality of the two objective values.
    """
    x = sol.fees
    if any(not 0 <= v <= 1 for v in x):
        raise CertificateError("fee outside [0, 1]")
    for row, pair in zip(model.rows, model.pairs):
        if sum(v for v, e in zip(x, row) if e) > 1:
            raise CertificateError(f"pair {pair} pays more than 1")
    ys = sol.row_duals + sol.bound_duals
    if any(y < 0 for y in ys):
        raise CertificateError("negative dual")
    for i, c in enumerate(model.objective):
        col = sum((y for y, row in zip(sol.row_duals, model.rows) if row[i]), Fraction(0))
        if col + sol.bound_duals[i] < c:
            raise CertificateError(f"dual constraint for edge {i} violated")
    primal = sum((c * v for c, v in zip(model.objective, x)), Fraction(0))
    if primal != sol.objective_value or sol.dual_value != primal:
        raise CertificateError(f"primal {primal} != dual {sol.dual_value}")


@dataclass(frozen=True)
class TreeSolution:
    fees: tuple[Fraction, ...]
    revenue: Fraction
    profit: Fraction
    lp: LPSolution


def optimize_tree(inst: TreeInstance, strict: bool = False) -> TreeSolution:
    model = build_lp(inst, strict=strict)
    sol = solve_lp(model)
    revenue = sol.objective_value
    return TreeSolution(sol.fees, revenue, revenue - len(inst.edges), sol)


def check_serve_all(inst: TreeInstance, sol: TreeSolution) -> None:
    report = evaluate_profit(inst.graph(sol.fees), inst.t)
    if not all(d.served for d in report.decisions):
        raise CertificateError("some positive-demand pair is not served")
    if report.revenue != sol.revenue:
        raise CertificateError(f"evaluator revenue {report.revenue} != LP value {sol.revenue}")


def grid_max(model: LPModel, q: int) -> tuple[int, tuple[int, ...]]:
    """Best objective over feasible fee vectors on ``{0, 1/q, ..., 1}^m``.

    Returned in units of ``1/q`` together with one maximizer. Exhaustive
    depth-first search (largest fee first) that prunes infeasible prefixes and
    prefixes whose optimistic completion cannot beat the incumbent.
    """
    m = model.m
    c = model.objective
    # rows touching each edge
    touches = [[r for r, row in enumerate(model.rows) if row[i]] for i in range(m)]
    load = [0] * len(model.rows)
    tail = [0] * (m + 1)
    for i in range(m - 1, -1, -1):
        tail[i] = tail[i + 1] + c[i] * q
    best = [-1, ()]
    units = [0] * m

    def dfs(i, value):
        if value + tail[i] <= best[0]:
            return
        if i == m:
            best[0], best[1] = value, tuple(units)
            return
        room = q - max((load[r] for r in touches[i]), default=0)
        for u in range(room, -1, -1):
            for r in touches[i]:
                load[r] += u
            units[i] = u
            dfs(i + 1, value + c[i] * u)
            for r in touches[i]:
                load[r] -= u
        units[i] = 0

    dfs(0, 0)
    return best[0], best[1]
