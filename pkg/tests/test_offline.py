import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from subsecretary.errors import BudgetError, GuaranteeViolation, InputError
from subsecretary.offline import (BruteForceMatchingSolver, BruteForceSolver, GreedyMatchingSolver,
                                  GreedySolver, MatchingGraph, MatchingSolverInput, TopKSolver,
                                  brute_force_cardinality, brute_force_matching,
                                  enumerate_matchings, greedy_cardinality, greedy_matching,
                                  greedy_stage_guarantee_check, top_k_modular)
from subsecretary.oracles import CoverageOracle, ModularOracle

from conftest import naive_best, random_concave, random_coverage


# ---- cardinality -----------------------------------------------------------

def test_brute_force_examples(ab_bc, modular_532):
    assert brute_force_cardinality(modular_532, range(3), 2) == (0, 1)
    assert brute_force_cardinality(ab_bc, range(2), 1) == (0,)
    assert brute_force_cardinality(modular_532, range(3), 0) == ()


def naive_argmax(oracle, items, k):
    cands = [c for r in range(k + 1) for c in itertools.combinations(sorted(items), r)]
    best = max(oracle.value(c) for c in cands)
    return min(c for c in cands if oracle.value(c) >= best - 1e-12)


def test_brute_force_tie_prefers_smallest_tuple():
    # every 2-subset containing item 1 reaches 4; (0, 1) is the smallest
    o = CoverageOracle([[0, 1], [0, 1, 2, 3], [2, 3]], [1, 1, 1, 1])
    assert brute_force_cardinality(o, range(3), 2) == (0, 1)
    assert brute_force_cardinality(o, [1, 2], 2) == (1,)


@given(st.integers(0, 2**32 - 1))
def test_brute_force_tie_rule_on_small_integer_instances(seed):
    rng = np.random.default_rng(seed)
    o = CoverageOracle([rng.choice(4, size=rng.integers(1, 3), replace=False).tolist() for _ in range(6)],
                       [1, 1, 1, 1])
    k = int(rng.integers(0, 4))
    assert brute_force_cardinality(o, range(6), k) == naive_argmax(o, range(6), k)


def test_brute_force_budget():
    with pytest.raises(BudgetError):
        brute_force_cardinality(ModularOracle(np.ones(40)), range(40), 6)


def test_greedy_hand_trace():
    o = CoverageOracle([[0, 1, 2], [0, 1], [2, 3]], [1, 1, 1, 1])
    assert greedy_cardinality(o, range(3), 2) == (0, 2)
    assert o.value((0, 2)) == 4


def test_greedy_is_top_k_on_modular(modular_532):
    assert greedy_cardinality(modular_532, range(3), 2) == (0, 1)
    assert top_k_modular(modular_532, range(3), 2) == (0, 1)


def test_top_k_skips_zero_weights_and_rejects_other_families(ab_bc):
    assert top_k_modular(ModularOracle([0, 2, 0]), range(3), 2) == (1,)
    with pytest.raises(InputError):
        top_k_modular(ab_bc, range(2), 1)


def test_stage_guarantee_values(ab_bc):
    assert greedy_stage_guarantee_check(ab_bc, range(2), 1, 1)[2] == pytest.approx(1 - 1 / math.e)
    assert greedy_stage_guarantee_check(ab_bc, range(2), 3, 1)[2] == pytest.approx(1 - math.exp(-3))


def test_stage_guarantee_raises_on_violation():
    # a non-submodular table can push greedy below the guarantee
    from subsecretary.oracles import TableOracle
    o = TableOracle(3, {(0,): 2, (1,): 1, (2,): 1, (0, 1): 2, (0, 2): 2, (1, 2): 10, (0, 1, 2): 10})
    with pytest.raises(GuaranteeViolation):
        greedy_stage_guarantee_check(o, range(3), 2, 2)


@given(st.integers(0, 2**32 - 1))
def test_brute_force_matches_naive_and_dominates_greedy(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 9))
    k = int(rng.integers(0, 5))
    o = random_coverage(rng, n) if seed % 2 else random_concave(rng, n)
    items = sorted(rng.choice(n, size=rng.integers(1, n + 1), replace=False).tolist())
    bf = brute_force_cardinality(o, items, k)
    gr = greedy_cardinality(o, items, k)
    assert set(bf) <= set(items) and len(bf) <= k
    assert o.value(bf) == pytest.approx(naive_best(o, items, k))
    assert o.value(bf) >= o.value(gr) - 1e-9
    assert len(gr) == min(k, len(items))  # strictly monotone: weights are positive


@given(st.integers(0, 2**32 - 1), st.permutations(range(8)))
def test_cardinality_solvers_ignore_presentation(seed, perm):
    rng = np.random.default_rng(seed)
    o = random_coverage(rng, 8)
    items = [j for j in perm if j != 3]
    for solver in (BruteForceSolver(2), GreedySolver(3)):
        assert solver(o, items) == solver(o, sorted(items))


# ---- matching --------------------------------------------------------------

def grid_2x2():
    g = MatchingGraph(2, 2, [(0, 0), (0, 1), (1, 0), (1, 1)])
    return g, ModularOracle([3, 1, 1, 3])


def test_matching_examples():
    g, o = grid_2x2()
    m = brute_force_matching(MatchingSolverInput(g, o, range(2)))
    assert [g.edges[i] for i in m] == [(0, 0), (1, 1)]
    assert o.value(m) == 6


def test_matching_trivial_cases():
    g = MatchingGraph(1, 1, [(0, 0)])
    assert greedy_matching(MatchingSolverInput(g, ModularOracle([2]), [0])) == (0,)
    g2 = MatchingGraph(2, 1, [(0, 0), (1, 0)])
    o2 = ModularOracle([5, 3])
    assert greedy_matching(MatchingSolverInput(g2, o2, [0, 1])) == (0,)
    empty = MatchingSolverInput(g2, o2, [0, 1], edges=())
    assert brute_force_matching(empty) == ()


def test_disjoint_edges_greedy_equals_exact():
    g = MatchingGraph(3, 3, [(0, 0), (1, 1), (2, 2)])
    inp = MatchingSolverInput(g, ModularOracle([1, 2, 3]), range(3))
    assert greedy_matching(inp) == brute_force_matching(inp) == (0, 1, 2)


def test_matching_input_validation():
    g = MatchingGraph(2, 1, [(0, 0), (1, 0)])
    with pytest.raises(InputError):
        MatchingSolverInput(g, ModularOracle([1]), [0])
    with pytest.raises(InputError):
        MatchingSolverInput(g, ModularOracle([1, 1]), [0], edges=(1,))
    with pytest.raises(InputError):
        MatchingGraph(1, 1, [(0, 1)])


def test_enumerate_matchings_counts():
    # complete K_{3,3} has sum_r C(3,r)^2 r! = 1 + 9 + 18 + 6 matchings
    g = MatchingGraph(3, 3, list(itertools.product(range(3), range(3))))
    ms = enumerate_matchings(g, range(9))
    assert len(ms) == 34 and len(set(ms)) == 34
    assert all(g.is_matching(m) for m in ms)
    with pytest.raises(BudgetError):
        enumerate_matchings(g, range(9), budget=10)


def random_matching_instance(rng, nl, nr):
    edges = [(l, r) for l in range(nl) for r in range(nr) if rng.random() < 0.7]
    g = MatchingGraph(nl, nr, edges)
    if not g.edges:
        g = MatchingGraph(nl, nr, [(0, 0)])
    m = len(g.edges)
    covers = [[int(rng.integers(0, 4)) + 4 * g.edges[i][1], 100 + i] for i in range(m)]
    return g, CoverageOracle(covers, rng.integers(1, 10, size=100 + m).tolist())


def naive_best_matching(g, o, edge_ids):
    best = 0.0
    for r in range(len(edge_ids) + 1):
        for s in itertools.combinations(edge_ids, r):
            if g.is_matching(s):
                best = max(best, o.value(s))
    return best


@given(st.integers(0, 2**32 - 1))
def test_matching_solvers_against_exhaustive_search(seed):
    rng = np.random.default_rng(seed)
    g, o = random_matching_instance(rng, int(rng.integers(1, 5)), int(rng.integers(1, 4)))
    left = sorted(rng.choice(g.n_left, size=rng.integers(1, g.n_left + 1), replace=False).tolist())
    inp = MatchingSolverInput(g, o, left)
    exact, greedy = brute_force_matching(inp), greedy_matching(inp)
    cached = BruteForceMatchingSolver()(inp)
    assert g.is_matching(exact) and g.is_matching(greedy)
    assert set(exact) <= set(inp.edges) and set(greedy) <= set(inp.edges)
    assert exact == cached
    assert o.value(exact) == pytest.approx(naive_best_matching(g, o, inp.edges))
    assert o.value(greedy) >= o.value(exact) / 3 - 1e-9


@given(st.integers(0, 2**32 - 1), st.permutations(range(5)))
def test_matching_solvers_ignore_presentation(seed, perm):
    rng = np.random.default_rng(seed)
    g, o = random_matching_instance(rng, 5, 3)
    a = MatchingSolverInput(g, o, perm[:4])
    b = MatchingSolverInput(g, o, sorted(perm[:4]))
    for solver in (BruteForceMatchingSolver(), GreedyMatchingSolver()):
        assert solver(a) == solver(b)


def test_cached_solvers_reset_on_new_instance():
    g, o = grid_2x2()
    solver = BruteForceMatchingSolver()
    assert solver(MatchingSolverInput(g, o, range(2))) == (0, 3)
    o2 = ModularOracle([1, 3, 3, 1])
    assert solver(MatchingSolverInput(g, o2, range(2))) == (1, 2)


def test_solver_metadata():
    assert BruteForceSolver(2).alpha == TopKSolver(2).alpha == 1.0
    assert GreedySolver(2).alpha == pytest.approx(1 - 1 / math.e)
    assert GreedyMatchingSolver.alpha == pytest.approx(1 / 3)
