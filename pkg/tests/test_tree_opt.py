from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from feeplan.core import TransactionMatrix, evaluate_profit
from feeplan.instance_io import random_tree
from feeplan.path_opt import PathInstance, brute_force_path
from feeplan.tree_opt import (
    LPModel,
    NotATreeError,
    TreeInstance,
    build_lp,
    check_serve_all,
    grid_max,
    optimize_tree,
    solve_lp,
    verify_certificate,
)

from oracles import lp_by_vertex_enumeration

F = Fraction


def single_edge(k=7):
    return TreeInstance(TransactionMatrix.from_pairs(2, {(1, 2): k}), ((1, 2),))


def abc_path():
    return TreeInstance(TransactionMatrix.from_pairs(3, {(1, 2): 3, (2, 3): 1, (1, 3): 2}), ((1, 2), (2, 3)))


def leaf_star():
    # centre 4, leaves 1..3, unit demand between every leaf pair
    return TreeInstance(TransactionMatrix.from_pairs(4, {(1, 2): 1, (1, 3): 1, (2, 3): 1}), ((1, 4), (2, 4), (3, 4)))


def test_build_lp_single_edge():
    model = build_lp(single_edge(7))
    assert model.objective == (7,) and model.rows == ((1,),)


def test_build_lp_path():
    model = build_lp(abc_path())
    assert model.objective == (5, 3)
    assert model.rows == ((1, 0), (1, 1), (0, 1))
    assert model.pairs == ((1, 2), (1, 3), (2, 3))


def test_build_lp_star():
    model = build_lp(leaf_star())
    assert model.objective == (2, 2, 2)
    assert sorted(model.rows) == [(0, 1, 1), (1, 0, 1), (1, 1, 0)]


def test_build_lp_skips_zero_demand_unless_strict():
    inst = TreeInstance(TransactionMatrix.from_pairs(3, {(1, 2): 4}), ((1, 2), (2, 3)))
    assert build_lp(inst).rows == ((1, 0),)
    assert len(build_lp(inst, strict=True).rows) == 3


@pytest.mark.parametrize(
    "edges",
    [((1, 2), (2, 3), (1, 3)), ((1, 2),), ((1, 2), (1, 2))],
)
def test_not_a_tree(edges):
    with pytest.raises(NotATreeError):
        TreeInstance(TransactionMatrix.zeros(3), edges)


@pytest.mark.parametrize(
    "inst, fees, revenue, profit",
    [
        (single_edge(7), (F(1),), 7, 6),
        (abc_path(), (F(1), F(0)), 5, 3),
        (leaf_star(), (F(1, 2),) * 3, 3, 0),
    ],
)
def test_optimize_tree_examples(inst, fees, revenue, profit):
    model = build_lp(inst)
    ref = lp_by_vertex_enumeration(model.objective, model.rows)
    assert ref == (revenue, fees)
    sol = optimize_tree(inst)
    assert sol.fees == fees
    assert sol.revenue == revenue and sol.profit == profit
    check_serve_all(inst, sol)


def test_zero_demand_returns_origin():
    inst = TreeInstance(TransactionMatrix.zeros(4), ((1, 2), (2, 3), (3, 4)))
    sol = optimize_tree(inst)
    assert sol.fees == (0, 0, 0) and sol.revenue == 0


def test_certificate_rejects_wrong_dual():
    model = build_lp(leaf_star())
    sol = solve_lp(model)
    from dataclasses import replace

    from feeplan.tree_opt import CertificateError

    with pytest.raises(CertificateError):
        verify_certificate(model, replace(sol, row_duals=(F(0),) * 3))


@st.composite
def tree_instances(draw, max_n=6):
    n = draw(st.integers(2, max_n))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    edges = random_tree(n, rng)
    demand = {(i, j): draw(st.integers(0, 9)) for i in range(1, n + 1) for j in range(i + 1, n + 1)}
    return TreeInstance(TransactionMatrix.from_pairs(n, demand), edges)


@settings(max_examples=60, deadline=None)
@given(tree_instances(max_n=5))
def test_simplex_matches_vertex_enumeration(inst):
    model = build_lp(inst)
    sol = solve_lp(model)
    ref = lp_by_vertex_enumeration(model.objective, model.rows)
    assert sol.objective_value == ref[0]
    assert sol.dual_value == sol.objective_value


@settings(max_examples=40, deadline=None)
@given(tree_instances(max_n=7))
def test_serve_all_and_grid_dominance(inst):
    sol = optimize_tree(inst)
    check_serve_all(inst, sol)
    best, units = grid_max(build_lp(inst), 5)
    assert F(best, 5) <= sol.revenue
    fees = [F(u, 5) for u in units]
    rep = evaluate_profit(inst.graph(fees), inst.t)
    assert all(d.served for d in rep.decisions)
    assert rep.revenue == F(best, 5)


def test_grid_max_brute_check():
    from itertools import product

    model = build_lp(abc_path())
    q = 4
    ref = max(
        sum(c * u for c, u in zip(model.objective, units))
        for units in product(range(q + 1), repeat=model.m)
        if all(sum(u for u, e in zip(units, row) if e) <= q for row in model.rows)
    )
    assert grid_max(model, q)[0] == ref


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 8), st.integers(0, 2**32 - 1))
def test_lp_dominates_serve_all_dp_sets(n, seed):
    rng = np.random.default_rng(seed)
    demand = {(i, j): int(rng.integers(0, 10)) for i in range(1, n + 1) for j in range(i + 1, n + 1)}
    t = TransactionMatrix.from_pairs(n, demand)
    inst = TreeInstance(t, tuple((k, k + 1) for k in range(1, n)))
    lp = optimize_tree(inst).revenue
    # best 0/1 set that serves every demanded pair (each crosses at most one fee-1 edge)
    from itertools import combinations

    best = 0
    for r in range(n):
        for ks in combinations(range(1, n), r):
            if all(sum(1 for k in ks if u <= k < v) <= 1 for u, v, _ in t.pairs()):
                best = max(best, sum(d for u, v, d in t.pairs() if any(u <= k < v for k in ks)))
    assert lp >= best
    dp = brute_force_path(PathInstance(t))
    if all(sum(1 for k in dp.fee_one_edges if u <= k < v) <= 1 for u, v, _ in t.pairs()):
        assert lp >= dp.revenue
