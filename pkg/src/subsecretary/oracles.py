"""Monotone submodular value oracles, property checkers and the multilinear extension.

A value oracle maps subsets of the ground set ``{0, ..., n-1}`` to
non-negative reals.  Four families are provided:

* :class:`CoverageOracle` -- weighted coverage of a finite universe,
* :class:`ModularOracle` -- additive non-negative item weights,
* :class:`ConcaveOracle` -- a concave shape (square root or cap) applied to a
  modular sum,
* :class:`TableOracle` -- an explicit table, used for hand-crafted examples
  (it may violate monotonicity or submodularity on purpose).

For the matching variant the same families are used with the ground set being
the edge list of the bipartite graph.

Subsets are canonicalised to sorted tuples, which doubles as the memo key.
The memo is a plain dict; concurrent readers may race on inserting the same
key, which is harmless because every writer stores the identical value.
"""

import itertools
import math

import numpy as np

from .errors import BudgetError, InputError
from .rng import stream

EXHAUSTIVE_CHECK_MAX_N = 12
EXACT_MULTILINEAR_MAX_N = 20
DEFAULT_CHECK_TRIALS = 10_000
_BATCH_ROWS = 1 << 15


class ValueOracle:
    """Black-box set function over ``range(n)`` with memoised evaluation.

    Subclasses implement :meth:`_value` on a canonical sorted tuple and may
    override :meth:`values_batch` with a vectorised version.
    """

    family = "abstract"

    def __init__(self, n):
        if int(n) < 1:
            raise InputError(f"ground set size must be >= 1, got {n}")
        self.n = int(n)
        self._memo = {}
        self._table = None
        self.evals = 0

    def key(self, subset):
        """Canonical sorted, de-duplicated tuple for ``subset``."""
        key = tuple(sorted({int(j) for j in subset}))
        if key and (key[0] < 0 or key[-1] >= self.n):
            bad = key[0] if key[0] < 0 else key[-1]
            raise InputError(f"item index {bad} out of range for n={self.n}")
        return key

    def value(self, subset, use_cache=True):
        key = self.key(subset)
        if use_cache:
            hit = self._memo.get(key)
            if hit is not None:
                return hit
        val = float(self._value(key))
        self.evals += 1
        if use_cache:
            self._memo[key] = val
        return val

    def marginal(self, j, subset):
        """``v(S + j) - v(S)``; zero when ``j`` is already in ``S``."""
        j = int(j)
        if not 0 <= j < self.n:
            raise InputError(f"item index {j} out of range for n={self.n}")
        key = self.key(subset)
        if j in key:
            return 0.0
        return self.value(key + (j,)) - self.value(key)

    def _value(self, key):
        raise NotImplementedError

    def values_batch(self, members):
        """Values of many sets given as a boolean ``(rows, n)`` membership matrix."""
        members = np.asarray(members, dtype=bool)
        if members.ndim != 2 or members.shape[1] != self.n:
            raise InputError(f"membership matrix must have shape (rows, {self.n})")
        return np.array([self.value(np.flatnonzero(row)) for row in members], dtype=float)

    def _batched(self, members, fn):
        # chunking bounds the size of intermediate (rows x universe) arrays
        members = np.asarray(members, dtype=bool)
        if members.ndim != 2 or members.shape[1] != self.n:
            raise InputError(f"membership matrix must have shape (rows, {self.n})")
        self.evals += members.shape[0]
        if members.shape[0] <= _BATCH_ROWS:
            return fn(members)
        return np.concatenate([fn(members[i:i + _BATCH_ROWS])
                               for i in range(0, members.shape[0], _BATCH_ROWS)])

    def value_table(self):
        """Values of all ``2**n`` subsets indexed by bitmask (cached, ``n <= 20``)."""
        if self.n > EXACT_MULTILINEAR_MAX_N:
            raise BudgetError(f"value table needs n <= {EXACT_MULTILINEAR_MAX_N}, got {self.n}")
        if self._table is None:
            self._table = self.values_batch(subset_masks(self.n))
        return self._table

    def expected_value(self, x):
        """Closed-form multilinear extension, or ``None`` if the family has none."""
        return None

    def coverage_form(self):
        """``(indptr, indices, weights)`` if the oracle is a weighted coverage function."""
        return None

    def params(self):
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}(n={self.n})"


class CoverageOracle(ValueOracle):
    """``v(S) = sum of weights of universe elements covered by some item of S``."""

    family = "coverage"

    def __init__(self, covers, weights):
        super().__init__(len(covers))
        self.weights = np.asarray(weights, dtype=float)
        if self.weights.ndim != 1 or np.any(self.weights < 0) or not np.all(np.isfinite(self.weights)):
            raise InputError("coverage weights must be a finite non-negative vector")
        universe = len(self.weights)
        self.covers = tuple(tuple(sorted({int(e) for e in c})) for c in covers)
        for j, cov in enumerate(self.covers):
            if cov and (cov[0] < 0 or cov[-1] >= universe):
                raise InputError(f"covers[{j}] references an element outside the universe")
        self.incidence = np.zeros((self.n, universe))
        for j, cov in enumerate(self.covers):
            self.incidence[j, list(cov)] = 1.0

    def _covered_sums(self, members):
        return _masked_sums((members @ self.incidence) > 0, self.weights)

    def _value(self, key):
        return self._covered_sums(_row(self.n, key))[0]

    def values_batch(self, members):
        return self._batched(members, self._covered_sums)

    def expected_value(self, x):
        x = np.asarray(x, dtype=float)
        miss = np.where(self.incidence > 0, 1.0 - x[:, None], 1.0).prod(axis=0)
        return float(self.weights @ (1.0 - miss))

    def coverage_form(self):
        lengths = [len(c) for c in self.covers]
        indptr = np.concatenate([[0], np.cumsum(lengths)]).astype(np.int64)
        indices = np.array([e for c in self.covers for e in c], dtype=np.int64)
        return indptr, indices, self.weights.copy()

    def params(self):
        return {"covers": [list(c) for c in self.covers], "weights": self.weights.tolist()}


class ModularOracle(ValueOracle):
    """``v(S) = sum_{j in S} w_j`` with ``w >= 0``."""

    family = "modular"

    def __init__(self, weights):
        w = np.asarray(weights, dtype=float)
        if w.ndim != 1 or len(w) < 1:
            raise InputError("modular weights must be a non-empty vector")
        super().__init__(len(w))
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise InputError("modular weights must be finite and non-negative")
        self.weights = w

    def _value(self, key):
        return _masked_sums(_row(self.n, key), self.weights)[0]

    def values_batch(self, members):
        return self._batched(members, lambda m: _masked_sums(m, self.weights))

    def expected_value(self, x):
        return float(self.weights @ np.asarray(x, dtype=float))

    def coverage_form(self):
        # every item covers a private element carrying its weight
        return (np.arange(self.n + 1, dtype=np.int64), np.arange(self.n, dtype=np.int64),
                self.weights.copy())

    def params(self):
        return {"weights": self.weights.tolist()}


class ConcaveOracle(ValueOracle):
    """``v(S) = g(sum_{j in S} w_j)`` with ``g = sqrt`` or ``g = min(cap, .)``."""

    family = "concave"

    def __init__(self, weights, shape="sqrt", cap=None):
        w = np.asarray(weights, dtype=float)
        if w.ndim != 1 or len(w) < 1:
            raise InputError("concave-over-modular weights must be a non-empty vector")
        super().__init__(len(w))
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise InputError("concave-over-modular weights must be finite and non-negative")
        if shape not in ("sqrt", "cap"):
            raise InputError(f"unknown concave shape {shape!r}; expected 'sqrt' or 'cap'")
        if shape == "cap" and (cap is None or cap < 0):
            raise InputError("cap shape needs a non-negative cap value")
        self.weights = w
        self.shape = shape
        self.cap = None if cap is None else float(cap)

    def _shape(self, total):
        if self.shape == "sqrt":
            return np.sqrt(total)
        return np.minimum(self.cap, total)

    def _value(self, key):
        return self._shape(_masked_sums(_row(self.n, key), self.weights))[0]

    def values_batch(self, members):
        return self._batched(members, lambda m: self._shape(_masked_sums(m, self.weights)))

    def params(self):
        out = {"weights": self.weights.tolist(), "shape": self.shape}
        if self.shape == "cap":
            out["cap"] = self.cap
        return out


class TableOracle(ValueOracle):
    """Explicit value table; every subset except the empty set must be listed."""

    family = "table"

    def __init__(self, n, values):
        super().__init__(n)
        if self.n > EXACT_MULTILINEAR_MAX_N:
            raise InputError("table oracles are limited to n <= 20")
        table = {}
        for subset, val in dict(values).items():
            table[self.key(subset)] = float(val)
        if table.setdefault((), 0.0) != 0.0:
            raise InputError("normalisation requires v(empty set) = 0")
        missing = 2 ** self.n - len(table)
        if missing:
            raise InputError(f"table oracle is missing {missing} subsets")
        if any(v < 0 or not math.isfinite(v) for v in table.values()):
            raise InputError("table values must be finite and non-negative")
        self.table = table

    def _value(self, key):
        return self.table[key]

    def params(self):
        return {"values": [[list(k), v] for k, v in sorted(self.table.items(), key=lambda kv: (len(kv[0]), kv[0]))]}


FAMILIES = {cls.family: cls for cls in (CoverageOracle, ModularOracle, ConcaveOracle, TableOracle)}


def oracle_from_params(family, params, n=None):
    """Inverse of ``(oracle.family, oracle.params())``."""
    if family not in FAMILIES:
        raise InputError(f"unknown oracle family {family!r}")
    p = dict(params)
    if family == "coverage":
        return CoverageOracle(p["covers"], p["weights"])
    if family == "modular":
        return ModularOracle(p["weights"])
    if family == "concave":
        return ConcaveOracle(p["weights"], p.get("shape", "sqrt"), p.get("cap"))
    if n is None:
        raise InputError("table oracles need n")
    return TableOracle(n, {tuple(k): v for k, v in p["values"]})


def _masked_sums(members, weights):
    """Row sums of ``weights`` over a boolean mask, bitwise identical for one row or many."""
    return np.where(members, weights, 0.0).sum(axis=1)


def _row(n, key):
    row = np.zeros((1, n), dtype=bool)
    row[0, list(key)] = True
    return row


def subset_masks(n):
    """Boolean ``(2**n, n)`` matrix; row ``m`` is the set encoded by bitmask ``m``."""
    masks = np.arange(2 ** n, dtype=np.int64)
    return ((masks[:, None] >> np.arange(n)) & 1).astype(bool)


def _mask_to_tuple(mask):
    return tuple(i for i in range(mask.bit_length()) if mask >> i & 1)


def evaluate(oracle, subset):
    """Memoised ``v(S)``."""
    return oracle.value(subset)


def marginal(oracle, j, subset):
    """``v(S + j) - v(S)``."""
    return oracle.marginal(j, subset)


# --------------------------------------------------------------------------
# property checks
# --------------------------------------------------------------------------

class PropertyReport:
    """Outcome of a property check.

    ``witness`` is ``(S, T, x)`` for a violated check: for submodularity the
    inequality ``v(S+x) - v(S) >= v(T+x) - v(T)`` fails; for monotonicity
    ``T = S + x`` and ``v(T) < v(S)``.
    """

    def __init__(self, prop, passed, witness, trials_checked):
        self.property = prop
        self.passed = passed
        self.witness = witness
        self.trials_checked = trials_checked

    def to_dict(self):
        w = None
        if self.witness is not None:
            s, t, x = self.witness
            w = {"S": list(s), "T": list(t), "x": x}
        return {"property": self.property, "passed": self.passed,
                "witness": w, "trials_checked": self.trials_checked}

    def __repr__(self):
        return (f"PropertyReport({self.property!r}, passed={self.passed}, "
                f"witness={self.witness}, trials_checked={self.trials_checked})")


def _tolerance(values, tol):
    scale = float(np.max(np.abs(values))) if len(values) else 0.0
    return tol * max(1.0, scale)


def submodularity_violated(oracle, s, t, x, tol=1e-9):
    """True if ``(S, T, x)`` breaks diminishing returns."""
    lhs = oracle.marginal(x, s)
    rhs = oracle.marginal(x, t)
    return lhs < rhs - tol * max(1.0, abs(oracle.value(tuple(t) + (x,))))


def monotonicity_violated(oracle, s, t, tol=1e-9):
    return oracle.value(t) < oracle.value(s) - tol * max(1.0, abs(oracle.value(s)))


def _check_args(oracle, mode, trials):
    if mode not in ("exhaustive", "randomized"):
        raise InputError(f"mode must be 'exhaustive' or 'randomized', got {mode!r}")
    if mode == "exhaustive" and oracle.n > EXHAUSTIVE_CHECK_MAX_N:
        raise BudgetError(f"exhaustive checks need n <= {EXHAUSTIVE_CHECK_MAX_N}, got n={oracle.n}")
    if mode == "randomized" and trials < 1:
        raise InputError("randomized checks need trials >= 1")


def check_submodular(oracle, mode="exhaustive", trials=DEFAULT_CHECK_TRIALS, seed=0, tol=1e-9):
    """Check ``v(S+x) - v(S) >= v(T+x) - v(T)`` for ``S <= T``, ``x`` not in ``T``.

    Exhaustive mode covers all ``n * 3**(n-1)`` triples at once: for each
    ``x`` the marginal ``g(T) = v(T+x) - v(T)`` must be non-increasing, which
    a subset-minimum sweep over the lattice verifies and localises.
    """
    _check_args(oracle, mode, trials)
    n = oracle.n
    if mode == "randomized":
        rng = stream(seed)
        for t in range(trials):
            x = int(rng.integers(n))
            rest = np.array([i for i in range(n) if i != x], dtype=int)
            in_t = rest[rng.random(len(rest)) < 0.5]
            in_s = in_t[rng.random(len(in_t)) < 0.5]
            s_key, t_key = oracle.key(in_s), oracle.key(in_t)
            if submodularity_violated(oracle, s_key, t_key, x, tol):
                return PropertyReport("submodular", False, (s_key, t_key, x), t + 1)
        return PropertyReport("submodular", True, None, trials)

    table = oracle.value_table()
    atol = _tolerance(table, tol)
    size = 1 << n
    masks = np.arange(size)
    for x in range(n):
        bit = 1 << x
        gain = np.full(size, np.inf)
        without = masks[(masks & bit) == 0]
        gain[without] = table[without | bit] - table[without]
        best = gain.copy()
        arg = masks.copy()
        for b in range(n):
            hi = masks[((masks >> b) & 1) == 1]
            lo = hi ^ (1 << b)
            better = best[lo] < best[hi]
            best[hi[better]] = best[lo[better]]
            arg[hi[better]] = arg[lo[better]]
        bad = without[best[without] < gain[without] - atol]
        if bad.size:
            t_mask = int(bad[0])
            witness = (_mask_to_tuple(int(arg[t_mask])), _mask_to_tuple(t_mask), x)
            return PropertyReport("submodular", False, witness, n * 3 ** (n - 1))
    return PropertyReport("submodular", True, None, n * 3 ** (n - 1))


def check_monotone(oracle, mode="exhaustive", trials=DEFAULT_CHECK_TRIALS, seed=0, tol=1e-9):
    """Check ``v(S) <= v(S + x)`` over pairs ``(S, S + x)``."""
    _check_args(oracle, mode, trials)
    n = oracle.n
    if mode == "randomized":
        rng = stream(seed)
        for t in range(trials):
            x = int(rng.integers(n))
            rest = np.array([i for i in range(n) if i != x], dtype=int)
            s_key = oracle.key(rest[rng.random(len(rest)) < 0.5])
            t_key = oracle.key(s_key + (x,))
            if monotonicity_violated(oracle, s_key, t_key, tol):
                return PropertyReport("monotone", False, (s_key, t_key, x), t + 1)
        return PropertyReport("monotone", True, None, trials)

    table = oracle.value_table()
    atol = _tolerance(table, tol)
    masks = np.arange(1 << n)
    for x in range(n):
        without = masks[(masks & (1 << x)) == 0]
        bad = without[table[without | (1 << x)] < table[without] - atol]
        if bad.size:
            s_mask = int(bad[0])
            witness = (_mask_to_tuple(s_mask), _mask_to_tuple(s_mask | (1 << x)), x)
            return PropertyReport("monotone", False, witness, n * 2 ** (n - 1))
    return PropertyReport("monotone", True, None, n * 2 ** (n - 1))


# --------------------------------------------------------------------------
# multilinear extension
# --------------------------------------------------------------------------

def fractional_point(x, n):
    """Validate and return ``x`` as a float vector in ``[0, 1]**n``."""
    x = np.asarray(x, dtype=float)
    if x.shape != (n,):
        raise InputError(f"fractional point must have shape ({n},), got {x.shape}")
    if np.any(~np.isfinite(x)) or np.any(x < 0) or np.any(x > 1):
        raise InputError("fractional point coordinates must lie in [0, 1]")
    return x


def product_weights(x):
    """Probability of each bitmask subset when item ``j`` is included w.p. ``x[j]``."""
    p = np.ones(1)
    for xj in x:
        p = np.concatenate([p * (1.0 - xj), p * xj])
    return p


def multilinear_exact(oracle, x):
    """``F(x) = sum_R v(R) prod_{i in R} x_i prod_{i not in R} (1 - x_i)`` by enumeration."""
    if oracle.n > EXACT_MULTILINEAR_MAX_N:
        raise BudgetError(f"exact multilinear extension needs n <= {EXACT_MULTILINEAR_MAX_N}")
    x = fractional_point(x, oracle.n)
    return float(product_weights(x) @ oracle.value_table())


def multilinear_mc(oracle, x, samples=10_000, seed=0):
    """Monte Carlo estimate of ``F(x)``; returns ``(estimate, standard error)``."""
    x = fractional_point(x, oracle.n)
    if int(samples) < 1:
        raise InputError("samples must be >= 1")
    samples = int(samples)
    rng = stream(seed)
    vals = np.empty(samples)
    for lo in range(0, samples, _BATCH_ROWS):
        hi = min(samples, lo + _BATCH_ROWS)
        vals[lo:hi] = oracle.values_batch(rng.random((hi - lo, oracle.n)) < x)
    if np.all(vals == vals[0]):
        return float(vals[0]), 0.0
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(samples))


def multilinear_value(oracle, x, samples=100_000, seed=0):
    """Best available value of ``F(x)``: closed form, exact enumeration, else sampled."""
    x = fractional_point(x, oracle.n)
    closed = oracle.expected_value(x)
    if closed is not None:
        return closed
    if oracle.n <= EXACT_MULTILINEAR_MAX_N:
        return multilinear_exact(oracle, x)
    return multilinear_mc(oracle, x, samples, seed)[0]


def all_subsets(items, max_size=None):
    """All subsets of ``items`` with at most ``max_size`` elements, size-major."""
    items = sorted(items)
    top = len(items) if max_size is None else min(max_size, len(items))
    return itertools.chain.from_iterable(itertools.combinations(items, r) for r in range(top + 1))
