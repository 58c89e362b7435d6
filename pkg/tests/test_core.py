from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from feeplan.core import (
    AsymmetricMatrixError,
    ChannelGraph,
    DimensionMismatchError,
    GraphError,
    NegativeEntryError,
    NonzeroDiagonalError,
    NotSquareError,
    TransactionMatrix,
    cheapest_path,
    evaluate_profit,
    validate_matrix,
)

from oracles import cheapest_by_enumeration, profit_by_enumeration

F = Fraction


def test_validate_minimal():
    t = validate_matrix([[0, 3], [3, 0]])
    assert t.n == 2
    assert t.demand(1, 2) == 3


@pytest.mark.parametrize(
    "raw, err",
    [
        ([[0, 1], [2, 0]], AsymmetricMatrixError),
        ([[1, 0], [0, 0]], NonzeroDiagonalError),
        ([[0, -1], [-1, 0]], NegativeEntryError),
        ([[0, 1, 2], [1, 0, 3]], NotSquareError),
    ],
)
def test_validate_rejects(raw, err):
    with pytest.raises(err):
        validate_matrix(raw)


def test_graph_rejects_bad_input():
    with pytest.raises(GraphError):
        ChannelGraph(2, {(1, 1): 0})
    with pytest.raises(GraphError):
        ChannelGraph(3, [((1, 2), 0), ((2, 1), 1)])
    with pytest.raises(GraphError):
        ChannelGraph(2, {(1, 2): F(3, 2)})
    with pytest.raises(GraphError):
        ChannelGraph(2, {(1, 2): 0.5})


def triangle(fee=1):
    return ChannelGraph(3, {(1, 2): fee, (1, 3): fee, (2, 3): fee})


def test_cheapest_path_sum_of_fees():
    g = ChannelGraph.path([F(3, 5), F(3, 5)])
    path, cost = cheapest_path(g, 1, 3)
    assert cost == F(6, 5)
    assert path == ((1, 2), (2, 3))


def test_cheapest_path_triangle_prefers_direct_edge():
    g = triangle()
    assert cheapest_by_enumeration(g.fees, 1, 2)[0] == 1
    assert cheapest_path(g, 1, 2) == (((1, 2),), F(1))


def test_cheapest_path_unreachable():
    g = ChannelGraph(4, {(1, 2): 0, (3, 4): 0})
    assert cheapest_path(g, 1, 4) is None


def test_tie_break_fewest_edges_then_lexicographic():
    # 1-4 direct at 1/2 vs 1-2-4 at 1/4+1/4: equal cost, fewer edges wins
    g = ChannelGraph(4, {(1, 4): F(1, 2), (1, 2): F(1, 4), (2, 4): F(1, 4), (1, 3): F(1, 4), (3, 4): F(1, 4)})
    assert cheapest_path(g, 1, 4)[0] == ((1, 4),)
    g2 = g.with_fees({(1, 2): F(1, 4), (2, 4): F(1, 4), (1, 3): F(1, 4), (3, 4): F(1, 4)})
    assert cheapest_path(g2, 1, 4)[0] == ((1, 2), (2, 4))


def test_profit_zero_fees():
    g = triangle(0)
    t = validate_matrix([[0, 4, 5], [4, 0, 6], [5, 6, 0]])
    rep = evaluate_profit(g, t)
    assert rep.revenue == 0
    assert rep.profit == -3


def test_profit_triangle_all_tens():
    t = validate_matrix([[0, 10, 10], [10, 0, 10], [10, 10, 0]])
    g = triangle()
    assert profit_by_enumeration(3, g.fees, t) == 27
    assert evaluate_profit(g, t).profit == 27


def test_profit_path_boundary():
    g = ChannelGraph.path([F(3, 5), F(3, 5)])
    t = validate_matrix([[0, 1, 1], [1, 0, 1], [1, 1, 0]])
    rep = evaluate_profit(g, t)
    served = {d.pair: d.served for d in rep.decisions}
    assert served == {(1, 2): True, (2, 3): True, (1, 3): False}
    assert rep.revenue == F(6, 5)
    assert rep.profit == F(6, 5) - 2
    assert profit_by_enumeration(3, g.fees, t) == rep.profit


def test_cost_exactly_one_is_served():
    g = ChannelGraph.path([F(1, 3), F(2, 3)])
    t = TransactionMatrix.from_pairs(3, {(1, 3): 7})
    rep = evaluate_profit(g, t)
    assert rep.decisions[0].served and rep.decisions[0].path_cost == 1
    assert rep.revenue == 7


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        evaluate_profit(triangle(), TransactionMatrix.zeros(4))


def test_padded_matrix():
    t = validate_matrix([[0, 2], [2, 0]]).padded(3)
    assert t.entries == ((0, 2, 0), (2, 0, 0), (0, 0, 0))


# ---- properties on random small graphs ------------------------------------

fee_values = st.sampled_from([F(0), F(1, 4), F(1, 3), F(1, 2), F(2, 3), F(3, 4), F(1)])


@st.composite
def instances(draw, max_n=5):
    n = draw(st.integers(2, max_n))
    slots = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    chosen = draw(st.lists(st.sampled_from(slots), unique=True, max_size=len(slots)))
    fees = {e: draw(fee_values) for e in chosen}
    demand = {e: draw(st.integers(0, 9)) for e in slots}
    return ChannelGraph(n, fees), TransactionMatrix.from_pairs(n, demand)


@settings(max_examples=150, deadline=None)
@given(instances())
def test_evaluator_matches_path_enumeration(inst):
    g, t = inst
    rep = evaluate_profit(g, t)
    assert rep.profit == profit_by_enumeration(g.vertex_count, g.fees, t)
    for d in rep.decisions:
        ref = cheapest_by_enumeration(g.fees, *d.pair)
        if ref is None:
            assert not d.served and d.path_cost is None
        else:
            assert d.path_cost == ref[0]
            assert d.served == (ref[0] <= 1)
            # tie-broken path is the enumerated minimum
            verts = [d.pair[0]]
            for u, v in d.path:
                verts.append(v if verts[-1] == u else u)
            assert tuple(verts) == ref[2]


@settings(max_examples=100, deadline=None)
@given(instances())
def test_profit_bounds_and_determinism(inst):
    g, t = inst
    rep = evaluate_profit(g, t)
    assert rep.profit <= t.total_demand() - g.m
    assert rep == evaluate_profit(g, t)
    assert evaluate_profit(g.with_fees({e: 0 for e in g.edges}), t).profit == -g.m
    assert rep.revenue == sum(d.path_cost * d.demand for d in rep.decisions if d.served)
    assert all(d.path_cost <= 1 for d in rep.decisions if d.served)


@settings(max_examples=100, deadline=None)
@given(instances(), st.data())
def test_adding_fee_one_edge_keeps_served_pairs(inst, data):
    g, t = inst
    missing = [(i, j) for i in range(1, g.vertex_count + 1) for j in range(i + 1, g.vertex_count + 1) if (i, j) not in g.fees]
    if not missing:
        return
    e = data.draw(st.sampled_from(missing))
    before = evaluate_profit(g, t)
    after = evaluate_profit(g.with_fees({**g.fees, e: 1}), t)
    was = {d.pair for d in before.decisions if d.served}
    now = {d.pair for d in after.decisions if d.served}
    assert was <= now


def test_parallel_evaluation_is_identical(rng):
    from concurrent.futures import ThreadPoolExecutor

    from conftest import random_matrix

    cases = []
    for _ in range(20):
        t = random_matrix(rng, 5)
        fees = {(i, j): F(int(rng.integers(0, 5)), 4) for i in range(1, 6) for j in range(i + 1, 6) if rng.random() < 0.6}
        cases.append((ChannelGraph(5, fees), t))
    seq = [evaluate_profit(g, t) for g, t in cases]
    with ThreadPoolExecutor(4) as ex:
        par = list(ex.map(lambda c: evaluate_profit(*c), cases))
    assert seq == par
