"""Bounded-variable primal simplex for ``max c.y  s.t.  A y <= beta, 0 <= y <= 1``.

Dense and tiny by design: ``m`` packing rows, one slack per row, structural
variables carried at their lower or upper bound while non-basic.  Entering
and leaving choices follow Bland's smallest-index rule, so degenerate
pivots cannot cycle.

State lives in two integer arrays so that a caller may re-optimise after
changing only ``c`` (the warm start used by continuous greedy):

``basis[i]``  variable index basic in row ``i`` (structural ``< ns``, slack ``ns + r``)
``status[v]`` 0 at lower bound, 1 at upper bound, 2 basic
"""

import numpy as np
from numba import njit

LOWER, UPPER, BASIC = 0, 1, 2
COST_TOL = 1e-11
PIVOT_TOL = 1e-11
RATIO_TOL = 1e-12
REFACTOR_EVERY = 50


@njit(cache=True)
def cold_state(ns, m):
    basis = np.empty(m, np.int64)
    status = np.zeros(ns + m, np.int64)
    for i in range(m):
        basis[i] = ns + i
        status[ns + i] = BASIC
    return basis, status


@njit(cache=True)
def _basis_inverse(A, basis):
    m, ns = A.shape
    B = np.zeros((m, m))
    for i in range(m):
        v = basis[i]
        if v < ns:
            for r in range(m):
                B[r, i] = A[r, v]
        else:
            B[v - ns, i] = 1.0
    return np.linalg.inv(B)


@njit(cache=True)
def basic_values(A, beta, basis, status):
    """Fresh basis inverse and basic-variable values for a given basis."""
    m, ns = A.shape
    Binv = _basis_inverse(A, basis)
    rhs = beta.copy()
    for j in range(ns):
        if status[j] == UPPER:
            for r in range(m):
                rhs[r] -= A[r, j]
    xB = Binv @ rhs
    for i in range(m):
        if xB[i] < 0.0:
            xB[i] = 0.0
        if basis[i] < ns and xB[i] > 1.0:
            xB[i] = 1.0
    return Binv, xB


@njit(cache=True)
def solve(c, A, beta, basis, status, max_iter):
    """Optimise in place from the given (primal feasible) basis.

    Returns the number of iterations, or ``-1`` on an iteration-cap or
    unboundedness failure.
    """
    Binv, xB = basic_values(A, beta, basis, status)
    return solve_warm(c, A, basis, status, Binv, xB, max_iter)


@njit(cache=True)
def solve_warm(c, A, basis, status, Binv, xB, max_iter):
    """Like :func:`solve` but also carries ``Binv`` and ``xB`` in place."""
    m, ns = A.shape
    nv = ns + m
    cB = np.empty(m)
    pi = np.empty(m)
    alpha = np.empty(m)
    it = 0
    while it < max_iter:
        it += 1
        for i in range(m):
            v = basis[i]
            cB[i] = c[v] if v < ns else 0.0
        for r in range(m):
            s = 0.0
            for i in range(m):
                s += cB[i] * Binv[i, r]
            pi[r] = s
        enter = -1
        sigma = 0.0
        for v in range(nv):
            st = status[v]
            if st == BASIC:
                continue
            if v < ns:
                d = c[v]
                for r in range(m):
                    d -= pi[r] * A[r, v]
            else:
                d = -pi[v - ns]
            if st == LOWER and d > COST_TOL:
                enter = v
                sigma = 1.0
                break
            if st == UPPER and d < -COST_TOL:
                enter = v
                sigma = -1.0
                break
        if enter < 0:
            return it
        if enter < ns:
            for i in range(m):
                s = 0.0
                for r in range(m):
                    s += Binv[i, r] * A[r, enter]
                alpha[i] = s
        else:
            for i in range(m):
                alpha[i] = Binv[i, enter - ns]
        step = 1.0 if enter < ns else np.inf
        leave = -1
        leave_upper = False
        for i in range(m):
            delta = -sigma * alpha[i]
            v = basis[i]
            if delta < -PIVOT_TOL:
                ratio = xB[i] / (-delta)
                to_upper = False
            elif delta > PIVOT_TOL and v < ns:
                ratio = (1.0 - xB[i]) / delta
                to_upper = True
            else:
                continue
            if ratio < 0.0:
                ratio = 0.0
            if ratio < step - RATIO_TOL:
                step = ratio
                leave = i
                leave_upper = to_upper
            elif leave >= 0 and abs(ratio - step) <= RATIO_TOL and v < basis[leave]:
                leave = i
                leave_upper = to_upper
        if leave < 0 and step == np.inf:
            return -1
        for i in range(m):
            xB[i] -= sigma * alpha[i] * step
        if leave < 0:
            status[enter] = UPPER if status[enter] == LOWER else LOWER
            continue
        out = basis[leave]
        status[out] = UPPER if leave_upper else LOWER
        basis[leave] = enter
        status[enter] = BASIC
        xB[leave] = step if sigma > 0 else 1.0 - step
        piv = alpha[leave]
        for r in range(m):
            Binv[leave, r] /= piv
        for i in range(m):
            if i != leave and alpha[i] != 0.0:
                f = alpha[i]
                for r in range(m):
                    Binv[i, r] -= f * Binv[leave, r]
    return -1


@njit(cache=True)
def primal_point(A, beta, basis, status):
    """Structural solution vector for the current basis, clipped to the box."""
    m, ns = A.shape
    y = np.zeros(ns)
    for j in range(ns):
        if status[j] == UPPER:
            y[j] = 1.0
    rhs = beta.copy()
    for j in range(ns):
        if status[j] == UPPER:
            for r in range(m):
                rhs[r] -= A[r, j]
    xB = _basis_inverse(A, basis) @ rhs
    for i in range(m):
        v = basis[i]
        if v < ns:
            y[v] = min(1.0, max(0.0, xB[i]))
    return y


@njit(cache=True)
def point_from_basis(xB, basis, status, y):
    ns = y.shape[0]
    for j in range(ns):
        y[j] = 1.0 if status[j] == UPPER else 0.0
    for i in range(basis.shape[0]):
        v = basis[i]
        if v < ns:
            y[v] = min(1.0, max(0.0, xB[i]))


@njit(cache=True)
def maximize(c, A, beta, max_iter):
    m, ns = A.shape
    basis, status = cold_state(ns, m)
    it = solve(c, A, beta, basis, status, max_iter)
    return primal_point(A, beta, basis, status), it


@njit(cache=True)
def _mix(z):
    # splitmix64 finaliser
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


@njit(cache=True)
def counter_uniform(key, j, c):
    """Uniform in ``(0, 1)`` from the counter ``(key, j, c)``; stateless."""
    z = _mix(key + np.uint64(0x9E3779B97F4A7C15) * (np.uint64(j) + np.uint64(1)))
    z = _mix(z ^ (np.uint64(c) * np.uint64(0xD1B54A32D192ED03) + np.uint64(0x632BE59BD9B4E019)))
    return ((z >> np.uint64(11)) + 0.5) * (1.0 / 9007199254740992.0)


@njit(cache=True)
def continuous_greedy_coverage(indptr, indices, elem_w, A, beta, steps, samples, key, max_iter):
    """Discretised continuous greedy for a coverage objective on support-local items.

    ``samples`` random sets are coupled across steps: item ``j`` belongs to
    sample ``r`` whenever a fixed uniform ``U[j, r]`` lies below the current
    ``x[j]``.  Since ``x`` only grows, the uniforms are never materialised;
    each item's order statistics are generated bottom-up on demand and
    assigned to samples by a lazy Fisher-Yates shuffle, all from the
    stateless counter generator keyed by ``key``.  ``uncovered[e]`` counts
    samples in which element ``e`` is not covered, and the sampled marginal
    of ``j`` is ``sum_{e in cover(j)} w_e * uncovered[e] / samples``.
    """
    ns = A.shape[1]
    m = A.shape[0]
    n_elem = elem_w.shape[0]
    count = np.zeros((samples, n_elem), np.int32)
    uncovered = np.full(n_elem, float(samples))
    x = np.zeros(ns)
    gains = np.zeros(ns)
    taken = np.zeros(ns, np.int64)
    nxt = np.full(ns, -1.0)
    perm = np.empty((ns, samples), np.int32)
    basis, status = cold_state(ns, m)
    Binv, xB = basic_values(A, beta, basis, status)
    y = np.zeros(ns)
    dt = 1.0 / steps
    pivots = 0
    for _ in range(steps):
        for j in range(ns):
            g = 0.0
            for p in range(indptr[j], indptr[j + 1]):
                e = indices[p]
                g += elem_w[e] * uncovered[e]
            gains[j] = g / samples
        it = solve_warm(gains, A, basis, status, Binv, xB, max_iter)
        if it < 0:
            return x, False
        pivots += it
        if pivots > REFACTOR_EVERY:
            # limit drift of the product-form inverse
            Binv, xB = basic_values(A, beta, basis, status)
            pivots = 0
        point_from_basis(xB, basis, status, y)
        for j in range(ns):
            if y[j] <= 0.0 or x[j] >= 1.0:
                continue
            hi = x[j] + y[j] * dt
            if nxt[j] < 0.0:
                for r in range(samples):
                    perm[j, r] = r
                v = counter_uniform(key, j, 0)
                nxt[j] = -np.expm1(np.log(v) / samples)
            k = taken[j]
            while k < samples and nxt[j] < hi:
                q = k + int(counter_uniform(key, j, 2 * k + 1) * (samples - k))
                r = perm[j, q]
                perm[j, q] = perm[j, k]
                perm[j, k] = r
                for p in range(indptr[j], indptr[j + 1]):
                    e = indices[p]
                    count[r, e] += 1
                    if count[r, e] == 1:
                        uncovered[e] -= 1.0
                k += 1
                if k < samples:
                    # next order statistic of the remaining samples - k uniforms
                    v = counter_uniform(key, j, 2 * k + 2)
                    nxt[j] = nxt[j] + (1.0 - nxt[j]) * -np.expm1(np.log(v) / (samples - k))
            taken[j] = k
            x[j] = hi
    for j in range(ns):
        if x[j] > 1.0:
            x[j] = 1.0
    return x, True
