"""Scaled packing polytopes, the linear-maximisation step and continuous greedy.

The polytope ``P(scale, S)`` is ``{x in [0,1]^n : A x <= scale * b, x_j = 0 for j not in S}``.
"""

from dataclasses import dataclass

import numpy as np

from . import _simplex
from .errors import InputError
from .oracles import EXACT_MULTILINEAR_MAX_N, product_weights, subset_masks
from .rng import derive_seed, stream

FEAS_TOL = 1e-9


def _max_iter(ns, m):
    return 50 * (ns + m) + 100


class PackingPolytope:
    """Packing constraints ``A x <= scale * b`` restricted to ``support``."""

    def __init__(self, A, b, scale=1.0, support=None):
        A = np.asarray(A, dtype=float)
        b = np.asarray(b, dtype=float)
        if A.ndim != 2:
            raise InputError("A must be a 2-d matrix")
        m, n = A.shape
        if b.shape != (m,):
            raise InputError(f"b must have shape ({m},), got {b.shape}")
        if np.any(A < 0):
            raise InputError("nonnegative coefficients required")
        if np.any(b <= 0):
            raise InputError("capacities b must be positive")
        if not 0 <= scale <= 1:
            raise InputError(f"scale must lie in [0, 1], got {scale}")
        if support is None:
            support = range(n)
        support = tuple(sorted({int(j) for j in support}))
        if support and (support[0] < 0 or support[-1] >= n):
            raise InputError("support index out of range")
        self.A, self.b, self.scale, self.support = A, b, float(scale), support

    @property
    def n(self):
        return self.A.shape[1]

    @property
    def m(self):
        return self.A.shape[0]

    @property
    def capacity(self):
        return self.scale * self.b

    def contains(self, x, tol=FEAS_TOL):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            return False
        off = np.ones(self.n, dtype=bool)
        off[list(self.support)] = False
        return bool(np.all(x >= -tol) and np.all(x <= 1 + tol) and np.all(np.abs(x[off]) <= tol)
                    and np.all(self.A @ x <= self.capacity + tol))

    def restricted(self):
        """Dense ``(A_S, capacity)`` for the support columns, C-contiguous."""
        return np.ascontiguousarray(self.A[:, list(self.support)]), self.capacity.copy()


def lp_maximize(c, polytope):
    """Maximise ``c . x`` over the polytope with an exact dense simplex."""
    c = np.asarray(c, dtype=float)
    if c.shape != (polytope.n,):
        raise InputError(f"objective must have shape ({polytope.n},), got {c.shape}")
    x = np.zeros(polytope.n)
    if not polytope.support:
        return x
    A_s, beta = polytope.restricted()
    y, it = _simplex.maximize(np.ascontiguousarray(c[list(polytope.support)]), A_s, beta,
                              _max_iter(*A_s.shape[::-1]))
    if it < 0:
        raise RuntimeError("simplex failed to converge")
    x[list(polytope.support)] = y
    return x


def _exact_gains(oracle, support, x_s, table):
    # F(x + 1_j) - F(x) = sum over R not containing j of p(R) [v(R+j) - v(R)]
    p = product_weights(x_s)
    gains = np.empty(len(support))
    for j in range(len(support)):
        tv = table.reshape(-1, 2, 1 << j)
        pv = p.reshape(-1, 2, 1 << j)
        gains[j] = float(np.sum(pv[:, 0, :] * (tv[:, 1, :] - tv[:, 0, :])))
    return gains


def _sampled_gains(oracle, support, members_s):
    samples = members_s.shape[0]
    full = np.zeros((samples, oracle.n), dtype=bool)
    full[:, list(support)] = members_s
    base = oracle.values_batch(full)
    gains = np.zeros(len(support))
    for k, j in enumerate(support):
        out = ~members_s[:, k]
        if not out.any():
            continue
        rows = full[out]
        rows[:, j] = True
        gains[k] = float(np.sum(oracle.values_batch(rows) - base[out])) / samples
    return gains


def continuous_greedy(oracle, polytope, steps=100, mc_samples=1000, seed=0, exact=None):
    """Discretised continuous greedy over ``polytope``.

    Starting from ``x = 0``, each of ``steps`` rounds estimates the marginal
    direction ``w_j = F(x + 1_j) - F(x)`` on the support, solves
    ``y = argmax_{y in P} w . y`` and moves ``x += y / steps``.  The result is
    a convex combination of polytope points and hence feasible.

    With ``exact`` (default: ``oracle.n <= 20``) the direction is computed by
    enumeration over the support.  Otherwise ``mc_samples`` sampled sets are
    used, with one uniform per (item, sample) fixed for the whole call and
    thresholded against the current ``x`` at every step (common random
    numbers), so each step's estimate is unbiased while consecutive steps
    share their samples.  Coverage-form oracles take a compiled path that
    draws those uniforms lazily from a counter-based hash and updates
    coverage counts incrementally.
    """
    if int(steps) < 1:
        raise InputError("steps must be >= 1")
    if int(mc_samples) < 1:
        raise InputError("mc_samples must be >= 1")
    if polytope.n != oracle.n:
        raise InputError(f"polytope has {polytope.n} variables but the oracle has n={oracle.n}")
    steps = int(steps)
    x = np.zeros(oracle.n)
    support = polytope.support
    if not support:
        return x
    if exact is None:
        exact = oracle.n <= EXACT_MULTILINEAR_MAX_N
    A_s, beta = polytope.restricted()
    ns, m = len(support), polytope.m
    max_iter = _max_iter(ns, m)

    if not exact:
        form = oracle.coverage_form()
        if form is not None:
            indptr, indices, weights = form
            x_s, ok = _coverage_kernel(indptr, indices, weights, support, A_s, beta, steps,
                                       int(mc_samples), derive_seed(seed, 0), max_iter)
            if not ok:
                raise RuntimeError("simplex failed to converge")
            x[list(support)] = x_s
            return x
        # item-major layout: row j holds item j's uniform for every sample
        uniforms = stream(seed).random((ns, int(mc_samples)))

    table = None
    if exact:
        if ns > EXACT_MULTILINEAR_MAX_N:
            raise InputError(f"exact gradients need a support of at most {EXACT_MULTILINEAR_MAX_N} items")
        full = np.zeros((1 << ns, oracle.n), dtype=bool)
        full[:, list(support)] = subset_masks(ns)
        table = oracle.values_batch(full)
    basis, status = _simplex.cold_state(ns, m)
    x_s = np.zeros(ns)
    for _ in range(steps):
        if exact:
            gains = _exact_gains(oracle, support, x_s, table)
        else:
            gains = _sampled_gains(oracle, support, (uniforms < x_s[:, None]).T)
        if _simplex.solve(gains, A_s, beta, basis, status, max_iter) < 0:
            raise RuntimeError("simplex failed to converge")
        x_s = x_s + _simplex.primal_point(A_s, beta, basis, status) / steps
    x[list(support)] = np.minimum(x_s, 1.0)
    return x


def _coverage_kernel(indptr, indices, weights, support, A_s, beta, steps, samples, key, max_iter):
    # relabel the support's covered elements densely so the count table stays small
    starts, ends = indptr[list(support)], indptr[[j + 1 for j in support]]
    local_ptr = np.concatenate([[0], np.cumsum(ends - starts)]).astype(np.int64)
    elems = np.concatenate([indices[s:e] for s, e in zip(starts, ends)]) if len(support) else np.zeros(0, np.int64)
    uniq, local_idx = np.unique(elems, return_inverse=True)
    return _simplex.continuous_greedy_coverage(local_ptr, local_idx.astype(np.int64), weights[uniq],
                                               A_s, beta, steps, samples, np.uint64(key), max_iter)


@dataclass(frozen=True)
class ContinuousGreedySolver:
    """Fractional offline solver ``A_F`` handed to the packing algorithms."""

    steps: int = 100
    mc_samples: int = 1000
    exact: bool = None
    kind = "continuous-greedy"
    alpha = 1 - 1 / np.e

    def __call__(self, oracle, polytope, seed=0):
        return continuous_greedy(oracle, polytope, self.steps, self.mc_samples, seed, self.exact)
