import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from subsecretary.errors import InputError
from subsecretary.oracles import CoverageOracle, ModularOracle, multilinear_exact, subset_masks
from subsecretary.packing import (FEAS_TOL, ContinuousGreedySolver, PackingPolytope,
                                  continuous_greedy, lp_maximize)

from conftest import random_concave, random_coverage


def vertex_lp_optimum(c, A, beta):
    """max c.x over {0 <= x <= 1, A x <= beta} by enumerating basic solutions."""
    m, n = A.shape
    rows = np.vstack([A, np.eye(n), -np.eye(n)])
    rhs = np.concatenate([beta, np.ones(n), np.zeros(n)])
    best = -np.inf
    for act in itertools.combinations(range(len(rows)), n):
        M = rows[list(act)]
        if abs(np.linalg.det(M)) < 1e-10:
            continue
        x = np.linalg.solve(M, rhs[list(act)])
        if np.all(rows @ x <= rhs + 1e-9):
            best = max(best, float(c @ x))
    return best


def test_lp_unit_knapsack():
    poly = PackingPolytope([[1.0, 1.0]], [1.0])
    x = lp_maximize(np.array([2.0, 1.0]), poly)
    np.testing.assert_allclose(x, [1, 0], atol=1e-12)


def test_lp_zero_objective_and_validation():
    poly = PackingPolytope([[1.0, 2.0]], [1.0])
    x = lp_maximize(np.zeros(2), poly)
    assert poly.contains(x)
    with pytest.raises(InputError):
        lp_maximize(np.zeros(3), poly)


def test_polytope_validation():
    with pytest.raises(InputError, match="nonnegative coefficients required"):
        PackingPolytope([[-1.0]], [1.0])
    with pytest.raises(InputError):
        PackingPolytope([[1.0]], [1.0], scale=1.5)


@given(st.integers(0, 2**32 - 1))
def test_lp_matches_vertex_enumeration(seed):
    rng = np.random.default_rng(seed)
    n, m = int(rng.integers(1, 6)), int(rng.integers(1, 5))
    A = rng.integers(0, 4, size=(m, n)).astype(float)
    b = rng.uniform(0.5, 4.0, size=m)
    scale = float(rng.uniform(0.1, 1.0))
    support = sorted(rng.choice(n, size=rng.integers(1, n + 1), replace=False).tolist())
    c = rng.normal(size=n)
    poly = PackingPolytope(A, b, scale, support)
    x = lp_maximize(c, poly)
    assert poly.contains(x)
    ref = vertex_lp_optimum(c[support], A[:, support], scale * b)
    assert c @ x == pytest.approx(ref, abs=1e-6)


def test_lp_beats_random_feasible_points():
    rng = np.random.default_rng(11)
    A = rng.integers(0, 4, size=(4, 6)).astype(float)
    b = rng.uniform(1, 4, size=4)
    c = rng.normal(size=6)
    poly = PackingPolytope(A, b)
    best = c @ lp_maximize(c, poly)
    pts = rng.random((100_000, 6))
    feasible = pts[np.all(pts @ A.T <= b, axis=1)]
    assert len(feasible) > 0
    assert np.all(feasible @ c <= best + 1e-9)


def test_lp_six_by_six_against_vertices():
    rng = np.random.default_rng(3)
    for _ in range(3):
        A = rng.integers(0, 4, size=(6, 6)).astype(float)
        b = rng.uniform(1, 5, size=6)
        c = rng.normal(size=6)
        x = lp_maximize(c, PackingPolytope(A, b))
        assert c @ x == pytest.approx(vertex_lp_optimum(c, A, b), abs=1e-6)


# ---- continuous greedy -----------------------------------------------------

def test_empty_support_gives_zero():
    o = ModularOracle([1.0, 2.0])
    x = continuous_greedy(o, PackingPolytope([[1.0, 1.0]], [1.0], 0.5, support=()))
    np.testing.assert_array_equal(x, 0)


@pytest.mark.parametrize("seed", range(10))
def test_modular_against_lp(seed):
    # for modular v the direction F(x + 1_j) - F(x) is w_j (1 - x_j), so the
    # process is guaranteed (1 - 1/e) of the LP optimum, not the optimum itself
    rng = np.random.default_rng(seed)
    w = rng.uniform(1, 5, size=8)
    A = rng.integers(0, 3, size=(3, 8)).astype(float)
    poly = PackingPolytope(A, np.array([2.0, 3.0, 2.0]))
    lp = w @ lp_maximize(w, poly)
    for exact in (True, False):
        x = continuous_greedy(ModularOracle(w), poly, exact=exact)
        assert w @ x >= (1 - 1 / np.e) * lp
        assert w @ x <= lp + 1e-9


def test_modular_first_step_follows_lp():
    # with one step x = y / 1 is exactly the LP maximiser of w
    w = np.array([3.0, 1.0, 2.0])
    poly = PackingPolytope([[1.0, 1.0, 1.0]], [1.0])
    x = continuous_greedy(ModularOracle(w), poly, steps=1)
    np.testing.assert_allclose(x, lp_maximize(w, poly))


def integral_opt(oracle, A, b):
    members = subset_masks(oracle.n)
    ok = np.all(members @ A.T <= b, axis=1)
    return float(oracle.values_batch(members[ok]).max())


@pytest.mark.parametrize("seed", range(5))
def test_coverage_approximation_against_integral_opt(seed):
    rng = np.random.default_rng(seed)
    o = random_coverage(rng, 10)
    A = rng.integers(0, 3, size=(2, 10)).astype(float)
    b = np.array([3.0, 3.0])
    x = continuous_greedy(o, PackingPolytope(A, b), steps=100)
    assert multilinear_exact(o, x) >= (1 - 1 / np.e - 0.05) * integral_opt(o, A, b)


@given(st.integers(0, 2**32 - 1), st.booleans())
def test_output_is_feasible(seed, exact):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 9))
    o = random_coverage(rng, n) if seed % 2 else random_concave(rng, n)
    A = rng.integers(0, 4, size=(2, n)).astype(float)
    b = rng.uniform(1, 4, size=2)
    support = rng.choice(n, size=rng.integers(1, n + 1), replace=False).tolist()
    poly = PackingPolytope(A, b, float(rng.uniform(0.05, 1)), support)
    x = continuous_greedy(o, poly, steps=20, mc_samples=200, seed=seed, exact=exact)
    assert poly.contains(x)
    assert np.all(A @ x <= poly.capacity + FEAS_TOL)


def test_sampled_path_tracks_exact_path():
    rng = np.random.default_rng(2)
    o = random_coverage(rng, 12)
    A = rng.integers(0, 3, size=(3, 12)).astype(float)
    poly = PackingPolytope(A, np.array([2.0, 2.0, 3.0]))
    exact = multilinear_exact(o, continuous_greedy(o, poly, exact=True))
    sampled = multilinear_exact(o, continuous_greedy(o, poly, mc_samples=1000, exact=False))
    assert sampled == pytest.approx(exact, rel=0.03)


def test_generic_sampled_path_for_non_coverage():
    rng = np.random.default_rng(8)
    o = random_concave(rng, 9)
    poly = PackingPolytope(np.ones((1, 9)), np.array([3.0]))
    x = continuous_greedy(o, poly, steps=30, mc_samples=300, exact=False)
    assert poly.contains(x)
    assert multilinear_exact(o, x) >= 0.9 * multilinear_exact(o, continuous_greedy(o, poly, exact=True))


def test_solver_is_seed_deterministic():
    o = CoverageOracle([[0, 1], [1, 2], [2, 3], [3, 0]], [1, 2, 3, 4])
    poly = PackingPolytope([[1, 1, 1, 1]], [2.0])
    s = ContinuousGreedySolver(steps=10, mc_samples=100, exact=False)
    np.testing.assert_array_equal(s(o, poly, 5), s(o, poly, 5))
