"""Exit criteria. Each test appends one PASS/FAIL line to the terminal summary."""

import time
from fractions import Fraction

import numpy as np
import pytest

from feeplan.cli import run_bench
from feeplan.core import TransactionMatrix
from feeplan.instance_io import random_tree
from feeplan.oracle import SearchConfig, cndf_brute_force
from feeplan.path_opt import PathInstance, brute_force_path, grid_revenues, maximal_intervals, optimize_path, zero_one_round
from feeplan.star_opt import certify_near_optimality, evaluate_star, star_profit
from feeplan.tree_opt import TreeInstance, build_lp, check_serve_all, grid_max, optimize_tree, verify_certificate

from conftest import ACCEPTANCE_LINES, random_matrix


def record(number, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def test_1_dp_equals_brute_force():
    rng = np.random.default_rng(1001)
    start = time.perf_counter()
    agree = 0
    for _ in range(200):
        n = int(rng.integers(2, 11))
        inst = PathInstance(random_matrix(rng, n, 0, 9))
        agree += optimize_path(inst).revenue == brute_force_path(inst).revenue
    elapsed = time.perf_counter() - start
    record(1, agree == 200 and elapsed < 10, f"DP = brute force on {agree}/200 paths in {elapsed:.2f}s (limit 10s)")


def test_2_zero_one_dominates_fractional_grid():
    rng = np.random.default_rng(1002)
    q = 20
    start = time.perf_counter()
    violations = 0
    for k in range(50):
        n = 2 + k % 5  # cycles through n = 2..6
        t = random_matrix(rng, n, 0, 9)
        best01 = brute_force_path(PathInstance(t)).revenue
        top = max(int(rev.max()) for _, rev in grid_revenues(t, q))
        violations += top > best01 * q
    elapsed = time.perf_counter() - start
    record(2, violations == 0 and elapsed < 60, f"{violations} grid (q=20) violations over 50 paths in {elapsed:.1f}s (limit 60s)")


def test_3_zero_one_round_postcondition():
    rng = np.random.default_rng(1003)
    ok = 0
    for _ in range(100):
        m = int(rng.integers(1, 11))
        den = int(rng.integers(1, 13))
        fees = [Fraction(int(rng.integers(0, den + 1)), den) for _ in range(m)]
        f01 = zero_one_round(fees)
        ok += all(sum(f01[i - 1:j]) == 1 for i, j in maximal_intervals(fees))
    record(3, ok == 100, f"every maximal interval sums to 1 on {ok}/100 vectors")


def test_4_tree_lp_certificate_and_grid_dominance():
    rng = np.random.default_rng(1004)
    start = time.perf_counter()
    ok = 0
    for _ in range(100):
        n = int(rng.integers(2, 9))
        t = random_matrix(rng, n, 0, 9)
        inst = TreeInstance(t, random_tree(n, rng))
        model = build_lp(inst)
        sol = optimize_tree(inst)
        verify_certificate(model, sol.lp)
        check_serve_all(inst, sol)
        best, _ = grid_max(model, 10)
        ok += sol.lp.dual_value == sol.revenue and Fraction(best, 10) <= sol.revenue
    elapsed = time.perf_counter() - start
    record(4, ok == 100 and elapsed < 60, f"exact certificate + q=10 dominance on {ok}/100 trees in {elapsed:.1f}s (limit 60s)")


def test_5_fractional_tree_golden():
    t = TransactionMatrix.from_pairs(4, {(1, 2): 1, (1, 3): 1, (2, 3): 1})
    sol = optimize_tree(TreeInstance(t, ((1, 4), (2, 4), (3, 4))))
    half = Fraction(1, 2)
    ok = sol.fees == (half, half, half) and sol.revenue == 3
    record(5, ok, f"3-leaf star fees {[str(f) for f in sol.fees]}, objective {sol.revenue}")


def test_6_star_within_one_of_connected_oracle():
    rng = np.random.default_rng(1006)
    start = time.perf_counter()
    violations = gap_errors = runs = 0
    for n in range(2, 6):
        for _ in range(30):
            t = random_matrix(rng, n, 0, 9)
            best = cndf_brute_force(t, SearchConfig(max_n=5, grid_q=4, connected_only=True))
            violations += star_profit(t) < best.profit - 1
            gap_errors += certify_near_optimality(t).gap != 1
            runs += 1
    elapsed = time.perf_counter() - start
    record(
        6,
        violations == 0 and gap_errors == 0 and runs == 120,
        f"{violations} violations, {gap_errors} gap != 1 over {runs} matrices (n=2..5, q=4) in {elapsed:.1f}s",
    )


def test_7_triangle():
    t = TransactionMatrix.from_pairs(3, {(1, 2): 10, (1, 3): 10, (2, 3): 10})
    best = cndf_brute_force(t, SearchConfig(grid_q=4))
    ok = (
        best.edges == ((1, 2), (1, 3), (2, 3))
        and best.fees == (1, 1, 1)
        and best.profit == 27
        and star_profit(t) == 27
    )
    record(7, ok, f"oracle {best.edges} fees {[str(f) for f in best.fees]} profit {best.profit}; star {star_profit(t)}")


def test_8_complexity_scaling():
    bench = run_bench([20, 40, 80], seeds=3, base_seed=8, repeats=3)
    start = time.perf_counter()
    rng = np.random.default_rng(1008)
    optimize_path(PathInstance(random_matrix(rng, 100, 0, 9)))
    t100 = time.perf_counter() - start
    slope = bench["slope"]
    record(8, slope <= 5.5 and t100 < 120, f"log-log slope {slope:.2f} (limit 5.5); n=100 in {t100:.2f}s (limit 120s)")


def test_9_star_closed_form_matches_evaluator():
    rng = np.random.default_rng(1009)
    ok = 0
    for _ in range(100):
        n = int(rng.integers(1, 13))
        t = random_matrix(rng, n, 0, 9, density=float(rng.random()))
        ok += evaluate_star(t).profit == star_profit(t)
    record(9, ok == 100, f"closed form = evaluator on {ok}/100 matrices")
