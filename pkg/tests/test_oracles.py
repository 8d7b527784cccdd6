import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from subsecretary.errors import BudgetError, InputError
from subsecretary.oracles import (ConcaveOracle, CoverageOracle, ModularOracle, TableOracle,
                                  check_monotone, check_submodular, evaluate, marginal,
                                  multilinear_exact, multilinear_mc, multilinear_value,
                                  oracle_from_params)

from conftest import random_concave, random_coverage


# ---- evaluation --------------------------------------------------------------

def test_coverage_values(ab_bc):
    assert evaluate(ab_bc, {0}) == 2
    assert evaluate(ab_bc, {0, 1}) == 3
    assert evaluate(ab_bc, set()) == 0


def test_marginals(ab_bc, modular_532):
    assert marginal(ab_bc, 1, {0}) == 1
    assert marginal(ab_bc, 0, {0}) == 0
    assert marginal(modular_532, 2, {0, 1}) == 2


def test_out_of_range_index(ab_bc):
    with pytest.raises(InputError):
        ab_bc.value({2})
    with pytest.raises(InputError):
        ab_bc.marginal(-1, ())


def test_memo_counts_only_misses(ab_bc):
    ab_bc.value((0, 1))
    ab_bc.value((1, 0))
    assert ab_bc.evals == 1


def test_set_semantics(ab_bc):
    assert ab_bc.value([1, 0, 1]) == ab_bc.value((0, 1))


def test_concave_shapes():
    assert ConcaveOracle([4, 5], "sqrt").value((0, 1)) == 3
    assert ConcaveOracle([4, 5], "cap", 6).value((0, 1)) == 6
    with pytest.raises(InputError):
        ConcaveOracle([1], "cap")


def test_table_oracle_requires_full_table():
    with pytest.raises(InputError):
        TableOracle(2, {(0,): 1})
    with pytest.raises(InputError):
        TableOracle(1, {(): 1, (0,): 2})


@pytest.mark.parametrize("oracle", [
    CoverageOracle([[0, 1], [1], [2, 3]], [1, 2, 3, 4]),
    ModularOracle([1, 0, 2.5]),
    ConcaveOracle([1, 2, 3], "cap", 3.5),
])
def test_params_round_trip(oracle):
    again = oracle_from_params(oracle.family, oracle.params(), oracle.n)
    for r in range(oracle.n + 1):
        for s in itertools.combinations(range(oracle.n), r):
            assert again.value(s) == oracle.value(s)


def test_batch_matches_scalar():
    rng = np.random.default_rng(1)
    for oracle in (random_coverage(rng, 7), random_concave(rng, 7), ModularOracle(rng.random(7))):
        members = rng.random((50, 7)) < 0.5
        batch = oracle.values_batch(members)
        scalar = [oracle.value(np.flatnonzero(r), use_cache=False) for r in members]
        np.testing.assert_allclose(batch, scalar, rtol=1e-12)


# ---- property checkers -----------------------------------------------------

def crafted_supermodular():
    return TableOracle(2, {(0,): 1, (1,): 1, (0, 1): 3})


def test_crafted_oracle_witness():
    rep = check_submodular(crafted_supermodular(), "exhaustive")
    assert not rep.passed
    assert rep.witness == ((), (1,), 0)


def test_witness_reproduces_violation():
    rep = check_submodular(crafted_supermodular(), "randomized", trials=200, seed=3)
    assert not rep.passed
    s, t, x = rep.witness
    o = crafted_supermodular()
    assert o.marginal(x, s) < o.marginal(x, t)


def test_non_monotone_witness():
    o = TableOracle(2, {(0,): 2, (1,): 1, (0, 1): 1})
    rep = check_monotone(o, "exhaustive")
    assert not rep.passed
    s, t, x = rep.witness
    assert set(t) == set(s) | {x} and o.value(t) < o.value(s)


def test_families_pass(ab_bc, modular_532):
    for o in (ab_bc, modular_532, ConcaveOracle([1, 2, 3, 4], "sqrt")):
        for mode in ("exhaustive", "randomized"):
            assert check_submodular(o, mode, 500).passed
            assert check_monotone(o, mode, 500).passed


def test_exhaustive_budget():
    with pytest.raises(BudgetError):
        check_submodular(ModularOracle(np.ones(13)), "exhaustive")


def brute_diminishing_returns(oracle):
    n = oracle.n
    for x in range(n):
        rest = [i for i in range(n) if i != x]
        for r in range(len(rest) + 1):
            for t in itertools.combinations(rest, r):
                for q in range(len(t) + 1):
                    for s in itertools.combinations(t, q):
                        if oracle.marginal(x, s) < oracle.marginal(x, t) - 1e-9:
                            return False
    return True


@given(st.integers(0, 2**32 - 1), st.integers(1, 6))
def test_random_families_are_submodular_and_monotone(seed, n):
    rng = np.random.default_rng(seed)
    for o in (random_coverage(rng, n), random_concave(rng, n)):
        assert brute_diminishing_returns(o)
        assert check_submodular(o, "exhaustive").passed
        assert check_monotone(o, "exhaustive").passed


@given(st.integers(0, 2**32 - 1))
def test_exhaustive_checker_agrees_with_brute_force(seed):
    # random (mostly non-submodular) tables: the fast sweep and the triple loop must agree
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 5))
    vals = {s: float(rng.integers(0, 6)) for r in range(1, n + 1)
            for s in itertools.combinations(range(n), r)}
    o = TableOracle(n, vals)
    assert check_submodular(o, "exhaustive").passed == brute_diminishing_returns(o)


# ---- multilinear extension -------------------------------------------------

def test_multilinear_indicator_and_zero(ab_bc):
    assert multilinear_exact(ab_bc, [1, 0]) == 2
    assert multilinear_exact(ab_bc, [0, 0]) == 0


def test_multilinear_modular_is_linear():
    w = np.array([5.0, 3.0, 2.0, 0.5])
    x = np.array([0.1, 0.7, 0.3, 1.0])
    assert multilinear_exact(ModularOracle(w), x) == pytest.approx(w @ x, abs=1e-12)


def test_multilinear_exact_equals_definition():
    rng = np.random.default_rng(5)
    o = random_coverage(rng, 5)
    x = rng.random(5)
    ref = 0.0
    for r in range(6):
        for s in itertools.combinations(range(5), r):
            p = math.prod(x[i] if i in s else 1 - x[i] for i in range(5))
            ref += p * o.value(s)
    assert multilinear_exact(o, x) == pytest.approx(ref, rel=1e-12)
    assert o.expected_value(x) == pytest.approx(ref, rel=1e-12)


def test_multilinear_mc_degenerate(ab_bc):
    assert multilinear_mc(ab_bc, [1, 1], samples=50) == (3.0, 0.0)


def test_multilinear_mc_modular_within_4se():
    w = np.arange(1.0, 9.0)
    x = np.linspace(0.1, 0.9, 8)
    est, se = multilinear_mc(ModularOracle(w), x, samples=100_000, seed=2)
    assert abs(est - w @ x) <= 4 * se


def test_multilinear_mc_convergence_rate():
    # within 4 standard errors in at least 99% of 100 seeded repetitions
    rng = np.random.default_rng(9)
    o = random_concave(rng, 8)
    x = rng.random(8)
    exact = multilinear_exact(o, x)
    hits = 0
    for seed in range(100):
        est, se = multilinear_mc(o, x, samples=2000, seed=seed)
        hits += abs(est - exact) <= 4 * se
    assert hits >= 99


def test_multilinear_budget_and_validation():
    with pytest.raises(BudgetError):
        multilinear_exact(ModularOracle(np.ones(21)), np.zeros(21))
    with pytest.raises(InputError):
        multilinear_exact(ModularOracle([1, 2]), [0.5, 1.5])
    with pytest.raises(InputError):
        multilinear_mc(ModularOracle([1]), [0.5], samples=0)


def test_multilinear_value_prefers_closed_form():
    o = CoverageOracle([[0], [0, 1]], [1, 2])
    assert multilinear_value(o, [0.5, 0.5]) == pytest.approx(multilinear_exact(o, [0.5, 0.5]))


@given(st.integers(0, 2**32 - 1), st.integers(0, 5), st.floats(0, 1))
def test_multilinear_coordinatewise_monotone(seed, j, bump):
    rng = np.random.default_rng(seed)
    o = random_coverage(rng, 6) if seed % 2 else random_concave(rng, 6)
    x = rng.random(6)
    y = x.copy()
    y[j] = x[j] + (1 - x[j]) * bump
    assert multilinear_exact(o, y) >= multilinear_exact(o, x) - 1e-9


def test_memoisation_is_transparent():
    rng = np.random.default_rng(4)
    o = random_coverage(rng, 6)
    for r in range(7):
        for s in itertools.combinations(range(6), r):
            assert o.value(s) == o.value(s, use_cache=False)
