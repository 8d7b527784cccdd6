"""Offline solvers handed to the online algorithms as black boxes.

Every solver canonicalises its input (sorted items, sorted edges) before
doing anything else, so its output depends on the revealed *set* only and
never on the order in which that set was presented.  Ties are broken towards
the lexicographically smallest sorted index tuple.
"""

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BudgetError, GuaranteeViolation, InputError
from .oracles import ModularOracle

BRUTE_FORCE_BUDGET = 2_000_000
MATCHING_BUDGET = 2_000_000
TIE_TOL = 1e-12
_CHUNK = 1 << 15


def _ties(values, tol=TIE_TOL):
    best = float(np.max(values))
    return best, values >= best - tol * max(1.0, abs(best))


def count_subsets(size, k):
    return sum(math.comb(size, r) for r in range(min(k, size) + 1))


# --------------------------------------------------------------------------
# cardinality constraint
# --------------------------------------------------------------------------

def brute_force_cardinality(oracle, items, k, budget=BRUTE_FORCE_BUDGET):
    """Exact ``argmax_{T <= L, |T| <= k} v(T)``."""
    if k < 0:
        raise InputError("k must be non-negative")
    items = oracle.key(items)
    total = count_subsets(len(items), k)
    if total > budget:
        raise BudgetError(f"brute force over {len(items)} items with k={k} needs {total} "
                          f"subsets, budget is {budget}")
    best_val = oracle.value(())
    best_key = ()
    arr = np.array(items, dtype=np.int64)
    for r in range(1, min(k, len(items)) + 1):
        combos = itertools.combinations(range(len(items)), r)
        while True:
            block = np.fromiter(itertools.chain.from_iterable(itertools.islice(combos, _CHUNK)),
                                dtype=np.int64).reshape(-1, r)
            if len(block) == 0:
                break
            members = np.zeros((len(block), oracle.n), dtype=bool)
            np.put_along_axis(members, arr[block], True, axis=1)
            top, tied = _ties(oracle.values_batch(members))
            if top > best_val + TIE_TOL * max(1.0, abs(best_val)):
                best_val, best_key = top, None
            if top >= best_val - TIE_TOL * max(1.0, abs(best_val)):
                # rows of a block come in lexicographic order
                cand = tuple(int(i) for i in arr[block[np.flatnonzero(tied)[0]]])
                if best_key is None or cand < best_key:
                    best_key = cand
    return best_key


def greedy_cardinality(oracle, items, k):
    """Nemhauser-Wolsey greedy: ``min(k, |L|)`` picks of the largest marginal gain."""
    if k < 0:
        raise InputError("k must be non-negative")
    remaining = list(oracle.key(items))
    chosen = []
    base = np.zeros(oracle.n, dtype=bool)
    current = 0.0
    for _ in range(min(k, len(remaining))):
        rows = np.repeat(base[None, :], len(remaining), axis=0)
        rows[np.arange(len(remaining)), remaining] = True
        gains = oracle.values_batch(rows) - current
        _, tied = _ties(gains)
        pick = int(np.flatnonzero(tied)[0])
        j = remaining.pop(pick)
        chosen.append(j)
        base[j] = True
        current = float(oracle.values_batch(base[None, :])[0])
    return tuple(sorted(chosen))


def top_k_modular(oracle, items, k):
    """Exact solver for modular objectives: the ``k`` heaviest positive items."""
    if not isinstance(oracle, ModularOracle):
        raise InputError("top-k is exact only for modular oracles")
    items = np.array(oracle.key(items), dtype=np.int64)
    w = oracle.weights[items]
    order = np.lexsort((items, -w))
    picked = [int(items[i]) for i in order[:k] if w[i] > 0]
    return tuple(sorted(picked))


def greedy_stage_guarantee_check(oracle, items, k, k_prime, budget=BRUTE_FORCE_BUDGET):
    """Check ``v(greedy_k) >= (1 - exp(-k/k')) * max_{|T| <= k'} v(T)``.

    Returns ``(greedy_value, opt_kprime_value, bound)`` and raises
    :class:`GuaranteeViolation` if the inequality fails.
    """
    if k_prime < 1 or k < 0:
        raise InputError("need k >= 0 and k' >= 1")
    g = oracle.value(greedy_cardinality(oracle, items, k))
    opt = oracle.value(brute_force_cardinality(oracle, items, k_prime, budget))
    bound = 1.0 - math.exp(-k / k_prime)
    if g < bound * opt - 1e-9 * max(1.0, opt):
        raise GuaranteeViolation(f"greedy_{k} = {g} < {bound:.6f} * OPT_{k_prime} = {bound * opt}")
    return g, opt, bound


@dataclass(frozen=True)
class BruteForceSolver:
    k: int
    budget: int = BRUTE_FORCE_BUDGET
    kind = "brute-force"
    alpha = 1.0

    def __call__(self, oracle, items):
        return brute_force_cardinality(oracle, items, self.k, self.budget)


@dataclass(frozen=True)
class GreedySolver:
    k: int
    kind = "greedy"
    alpha = 1 - 1 / math.e

    def __call__(self, oracle, items):
        return greedy_cardinality(oracle, items, self.k)


@dataclass(frozen=True)
class TopKSolver:
    k: int
    kind = "top-k"
    alpha = 1.0

    def __call__(self, oracle, items):
        return top_k_modular(oracle, items, self.k)


# --------------------------------------------------------------------------
# bipartite matching
# --------------------------------------------------------------------------

class MatchingGraph:
    """Bipartite graph with online side ``L = range(n_left)``.

    Edges are stored sorted by ``(l, r)``; edge ``i`` of the sorted list is
    item ``i`` of the edge-valued oracle.
    """

    def __init__(self, n_left, n_right, edges):
        if n_left < 1 or n_right < 0:
            raise InputError("need n_left >= 1 and n_right >= 0")
        self.n_left, self.n_right = int(n_left), int(n_right)
        es = sorted({(int(l), int(r)) for l, r in edges})
        for l, r in es:
            if not (0 <= l < self.n_left and 0 <= r < self.n_right):
                raise InputError(f"edge ({l}, {r}) has an endpoint out of range")
        self.edges = tuple(es)
        self.index = {e: i for i, e in enumerate(self.edges)}
        self.by_left = [[] for _ in range(self.n_left)]
        for i, (l, _) in enumerate(self.edges):
            self.by_left[l].append(i)

    def edges_of(self, left):
        """Sorted edge indices incident to the given L-vertices."""
        out = []
        for l in sorted({int(u) for u in left}):
            if not 0 <= l < self.n_left:
                raise InputError(f"L-vertex {l} out of range")
            out.extend(self.by_left[l])
        return tuple(out)

    def is_matching(self, edge_ids):
        ls = [self.edges[i][0] for i in edge_ids]
        rs = [self.edges[i][1] for i in edge_ids]
        return len(set(ls)) == len(ls) and len(set(rs)) == len(rs)

    def __eq__(self, other):
        return (isinstance(other, MatchingGraph) and self.n_left == other.n_left
                and self.n_right == other.n_right and self.edges == other.edges)

    def __repr__(self):
        return f"MatchingGraph({self.n_left}x{self.n_right}, {len(self.edges)} edges)"


@dataclass
class MatchingSolverInput:
    """The subgraph revealed so far: arrived L-vertices, all of R, their edges."""

    graph: MatchingGraph
    oracle: object
    left: tuple
    edges: tuple = field(default=None)

    def __post_init__(self):
        if self.oracle.n != len(self.graph.edges):
            raise InputError("edge oracle size does not match the edge list")
        self.left = tuple(sorted({int(u) for u in self.left}))
        allowed = self.graph.edges_of(self.left)
        if self.edges is None:
            self.edges = allowed
        else:
            self.edges = tuple(sorted({int(i) for i in self.edges}))
            if not set(self.edges) <= set(allowed):
                raise InputError("edge list references an unrevealed L-vertex")


def greedy_matching(inp):
    """Add the best non-conflicting edge while its marginal gain is positive."""
    g, oracle = inp.graph, inp.oracle
    chosen, used_l, used_r = [], set(), set()
    base = np.zeros(oracle.n, dtype=bool)
    current = 0.0
    while True:
        cand = [i for i in inp.edges if g.edges[i][0] not in used_l and g.edges[i][1] not in used_r]
        if not cand:
            break
        rows = np.repeat(base[None, :], len(cand), axis=0)
        rows[np.arange(len(cand)), cand] = True
        gains = oracle.values_batch(rows) - current
        top, tied = _ties(gains)
        if top <= TIE_TOL * max(1.0, abs(current)):
            break
        i = cand[int(np.flatnonzero(tied)[0])]
        chosen.append(i)
        used_l.add(g.edges[i][0])
        used_r.add(g.edges[i][1])
        base[i] = True
        current = float(oracle.values_batch(base[None, :])[0])
    return tuple(sorted(chosen))


def enumerate_matchings(graph, edge_ids, budget=MATCHING_BUDGET):
    """All matchings within ``edge_ids`` as sorted tuples, in lexicographic order."""
    by_left = {}
    for i in sorted(edge_ids):
        by_left.setdefault(graph.edges[i][0], []).append(i)
    lefts = sorted(by_left)
    out = []

    def rec(pos, used_r, acc):
        if len(out) > budget:
            raise BudgetError(f"more than {budget} matchings to enumerate")
        out.append(tuple(acc))
        for q in range(pos, len(lefts)):
            for i in by_left[lefts[q]]:
                r = graph.edges[i][1]
                if r not in used_r:
                    used_r.add(r)
                    acc.append(i)
                    rec(q + 1, used_r, acc)
                    acc.pop()
                    used_r.discard(r)

    rec(0, set(), [])
    return out


def _best_matching(matchings, vals):
    _, tied = _ties(vals)
    return min(matchings[i] for i in np.flatnonzero(tied))


def brute_force_matching(inp, budget=MATCHING_BUDGET):
    """Exact ``argmax`` of ``v`` over all matchings of the revealed subgraph."""
    ms = enumerate_matchings(inp.graph, inp.edges, budget)
    members = np.zeros((len(ms), inp.oracle.n), dtype=bool)
    for row, m in enumerate(ms):
        members[row, list(m)] = True
    return _best_matching(ms, inp.oracle.values_batch(members))


class GreedyMatchingSolver:
    kind = "greedy"
    alpha = 1 / 3

    def __init__(self):
        self._owner = None
        self._cache = {}

    def __call__(self, inp):
        if self._owner is None or self._owner[0] is not inp.graph or self._owner[1] is not inp.oracle:
            self._owner = (inp.graph, inp.oracle)
            self._cache = {}
        if inp.edges not in self._cache:
            self._cache[inp.edges] = greedy_matching(inp)
        return self._cache[inp.edges]


class BruteForceMatchingSolver:
    """Exact matching solver that enumerates the full graph once.

    Every revealed subgraph's matchings are the full-graph matchings whose
    edges are all revealed, so each call is a bitmask filter plus an argmax.
    Graphs with more than 64 edges fall back to per-call enumeration.
    """

    kind = "brute-force"
    alpha = 1.0

    def __init__(self, budget=MATCHING_BUDGET):
        self.budget = budget
        self._prepared = None
        self._cache = {}

    def _prepare(self, graph, oracle):
        ms = enumerate_matchings(graph, range(len(graph.edges)), self.budget)
        masks = np.zeros(len(ms), dtype=np.uint64)
        members = np.zeros((len(ms), oracle.n), dtype=bool)
        for row, m in enumerate(ms):
            members[row, list(m)] = True
            masks[row] = sum(1 << i for i in m)
        self._prepared = (graph, oracle, ms, masks, oracle.values_batch(members))
        self._cache = {}

    def __call__(self, inp):
        g, oracle = inp.graph, inp.oracle
        if len(g.edges) > 64:
            return brute_force_matching(inp, self.budget)
        if self._prepared is None or self._prepared[0] is not g or self._prepared[1] is not oracle:
            self._prepare(g, oracle)
        if inp.edges in self._cache:
            return self._cache[inp.edges]
        _, _, ms, masks, vals = self._prepared
        allowed = np.uint64(sum(1 << i for i in inp.edges))
        rows = np.flatnonzero((masks & ~allowed) == 0)
        _, tied = _ties(vals[rows])
        best = min(ms[rows[i]] for i in np.flatnonzero(tied))
        self._cache[inp.edges] = best
        return best
