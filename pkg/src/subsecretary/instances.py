"""Problem instances, seeded generators and the versioned JSON instance format.

File layout (UTF-8 JSON, keys sorted, two-space indent)::

    {
      "format": "subsecretary-instance",
      "version": 1,
      "variant": "cardinality" | "matching" | "packing",
      "n": <online items: ground-set size, or |L| for matching>,
      "oracle": {"family": ..., "params": {...}},
      "k": <cardinality only>,
      "graph": {"n_left": .., "n_right": .., "edges": [[l, r], ...]},   # matching
      "A": [[...], ...], "b": [...],                                    # packing
      "declared": {"B": .., "d": ..}                                    # optional, packing
    }

Floats are written with 12 significant digits, so a save/load/save cycle is
byte-identical.  For matching instances the oracle's ground set is the sorted
edge list.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, ParseError, ValidationError
from .offline import MatchingGraph
from .oracles import FAMILIES, CoverageOracle, ConcaveOracle, ModularOracle, oracle_from_params
from .rng import stream

FORMAT = "subsecretary-instance"
VERSION = 1
SIG_DIGITS = 12
VARIANTS = ("cardinality", "matching", "packing")
GEN_FAMILIES = ("coverage", "modular", "concave", "edge-valued")


def round_sig(x, digits=SIG_DIGITS):
    return float(format(float(x), f".{digits}g"))


def _clean(obj):
    """Recursively round floats and turn numpy scalars into plain Python values."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return None
        return round_sig(x)
    return obj


def dumps(obj):
    return json.dumps(_clean(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def loads(text, source="<string>"):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


# --------------------------------------------------------------------------
# instance types
# --------------------------------------------------------------------------

@dataclass
class CardinalityInstance:
    oracle: object
    k: int
    variant = "cardinality"

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 0:
            raise InputError(f"k must be a non-negative integer, got {self.k}")
        self.k = int(self.k)

    @property
    def n(self):
        return self.oracle.n


@dataclass
class MatchingInstance:
    graph: MatchingGraph
    oracle: object
    variant = "matching"

    def __post_init__(self):
        if self.oracle.n != len(self.graph.edges):
            raise InputError(f"edge oracle has n={self.oracle.n} but the graph has "
                             f"{len(self.graph.edges)} edges")

    @property
    def n(self):
        return self.graph.n_left


def capacity_ratio(A, b):
    """``B = min_i b_i / max_j a_ij`` over rows with a nonzero coefficient."""
    A = np.asarray(A, dtype=float)
    rowmax = A.max(axis=1) if A.size else np.zeros(len(b))
    live = rowmax > 0
    if not np.any(live):
        return math.inf
    return float(np.min(np.asarray(b, dtype=float)[live] / rowmax[live]))


def column_sparsity(A):
    A = np.asarray(A)
    return int((A != 0).sum(axis=0).max()) if A.size else 0


@dataclass
class PackingInstance:
    oracle: object
    A: np.ndarray
    b: np.ndarray
    declared: dict = field(default=None)
    variant = "packing"

    def __post_init__(self):
        self.A = np.asarray(self.A, dtype=float)
        self.b = np.asarray(self.b, dtype=float)
        if self.A.ndim != 2 or self.A.shape[1] != self.oracle.n:
            raise InputError(f"A must have shape (m, {self.oracle.n})")
        if self.b.shape != (self.A.shape[0],):
            raise InputError(f"b must have shape ({self.A.shape[0]},)")
        if np.any(self.A < 0):
            raise InputError("nonnegative coefficients required")
        if np.any(self.b <= 0):
            raise InputError("capacities b must be positive")

    @property
    def n(self):
        return self.oracle.n

    @property
    def m(self):
        return self.A.shape[0]

    @property
    def B(self):
        return capacity_ratio(self.A, self.b)

    @property
    def d(self):
        return column_sparsity(self.A)

    @property
    def psi(self):
        from .bounds import psi
        return psi(self.B, self.d)


# --------------------------------------------------------------------------
# generators
# --------------------------------------------------------------------------

def _gen_oracle(family, n, rng, universe=None):
    if family in ("coverage", "edge-valued"):
        universe = universe or max(2 * n, 8)
        covers = [rng.choice(universe, size=int(rng.integers(1, 4)), replace=False) for _ in range(n)]
        return CoverageOracle(covers, rng.integers(1, 10, size=universe).astype(float))
    weights = np.round(rng.uniform(0.05, 1.0, size=n), 6)
    if family == "modular":
        return ModularOracle(weights)
    if family == "concave":
        if rng.random() < 0.5:
            return ConcaveOracle(weights, "sqrt")
        return ConcaveOracle(weights, "cap", round(float(weights.sum()) / 3, 6))
    raise InputError(f"unknown family {family!r}; choose from {', '.join(GEN_FAMILIES)}")


def _edge_coverage(graph, rng):
    # each edge covers a topic of its R-vertex plus one of its own, so edges
    # into the same R-vertex overlap and the objective is not modular
    topics = 3
    n_r = max(graph.n_right, 1)
    universe = n_r * topics + len(graph.edges)
    covers = []
    for i, (_, r) in enumerate(graph.edges):
        covers.append([r * topics + int(rng.integers(topics)), n_r * topics + i])
    return CoverageOracle(covers, rng.integers(1, 10, size=universe).astype(float))


def gen_cardinality(n, k, family="coverage", seed=0):
    if family == "edge-valued":
        raise InputError("family 'edge-valued' is only available for matching instances")
    rng = stream(seed, 0)
    return CardinalityInstance(_gen_oracle(family, n, rng), k)


def gen_matching(n_left, n_right, edge_prob=1.0, family="edge-valued", seed=0):
    rng = stream(seed, 1)
    edges = [(l, r) for l in range(n_left) for r in range(n_right) if rng.random() < edge_prob]
    if not edges:
        edges = [(0, 0)]
    graph = MatchingGraph(n_left, n_right, edges)
    if family == "edge-valued":
        oracle = _edge_coverage(graph, rng)
    else:
        oracle = _gen_oracle(family, len(graph.edges), rng)
    return MatchingInstance(graph, oracle)


def gen_packing(n, m, B=2, d=2, family="coverage", seed=0, max_coef=3):
    """Packing instance whose capacity ratio is exactly ``B`` and column sparsity exactly ``d``.

    Coefficients are integers in ``1..max_coef``; every column has between 1
    and ``d`` nonzeros with column 0 having exactly ``d``, every row has a
    nonzero, and ``b_i = B * max_j a_ij``.  ``d = 0`` gives the zero matrix
    with unit capacities.
    """
    if family == "edge-valued":
        raise InputError("family 'edge-valued' is only available for matching instances")
    if not 0 <= d <= m:
        raise InputError(f"column sparsity d={d} must lie in [0, m={m}]")
    if B <= 0:
        raise InputError("B must be positive")
    rng = stream(seed, 2)
    oracle = _gen_oracle(family, n, rng)
    A = np.zeros((m, n))
    if d == 0:
        return PackingInstance(oracle, A, np.ones(m))
    for j in range(n):
        size = d if j == 0 else int(rng.integers(1, d + 1))
        rows = rng.choice(m, size=size, replace=False)
        A[rows, j] = rng.integers(1, max_coef + 1, size=size)
    for i in np.flatnonzero(A.sum(axis=1) == 0):
        nnz = (A != 0).sum(axis=0)
        open_cols = np.flatnonzero(nnz[1:] < d) + 1
        if len(open_cols):
            j = int(open_cols[rng.integers(len(open_cols))])
            A[i, j] = rng.integers(1, max_coef + 1)
            continue
        # every column is full: move a coefficient out of a row that can spare one
        rows_nnz = (A != 0).sum(axis=1)
        spare = [(r, j) for j in range(n) for r in np.flatnonzero(A[:, j]) if rows_nnz[r] > 1]
        if not spare:
            raise InputError(f"no {m}x{n} matrix has every row nonzero with column sparsity {d}")
        r, j = spare[int(rng.integers(len(spare)))]
        A[i, j], A[r, j] = A[r, j], 0.0
    b = B * A.max(axis=1)
    inst = PackingInstance(oracle, A, b)
    if inst.d != d or not math.isclose(inst.B, B, rel_tol=1e-12):
        raise RuntimeError(f"generator produced B={inst.B}, d={inst.d} instead of B={B}, d={d}")
    return inst


def gen_instance(variant, family="coverage", seed=0, **size):
    """Dispatch to the variant's generator; ``size`` holds its size parameters."""
    if variant == "cardinality":
        return gen_cardinality(size.get("n", 10), size.get("k", 2), family, seed)
    if variant == "matching":
        return gen_matching(size.get("n_left", size.get("n", 6)), size.get("n_right", 3),
                            size.get("edge_prob", 1.0), family, seed)
    if variant == "packing":
        return gen_packing(size.get("n", 10), size.get("m", 2), size.get("B", 2), size.get("d", 2),
                           family, seed)
    raise InputError(f"unknown variant {variant!r}; choose from {', '.join(VARIANTS)}")


# --------------------------------------------------------------------------
# (de)serialisation
# --------------------------------------------------------------------------

def instance_to_dict(inst):
    out = {"format": FORMAT, "version": VERSION, "variant": inst.variant, "n": inst.n,
           "oracle": {"family": inst.oracle.family, "params": inst.oracle.params()}}
    if inst.variant == "cardinality":
        out["k"] = inst.k
    elif inst.variant == "matching":
        g = inst.graph
        out["graph"] = {"n_left": g.n_left, "n_right": g.n_right, "edges": [list(e) for e in g.edges]}
    else:
        out["A"] = inst.A
        out["b"] = inst.b
        if inst.declared is not None:
            out["declared"] = dict(inst.declared)
    return out


def _require(obj, key, path, kind=None):
    if not isinstance(obj, dict) or key not in obj:
        raise ValidationError(f"{path}.{key}: required field missing")
    val = obj[key]
    if kind is not None and (not isinstance(val, kind) or (isinstance(val, bool) and kind is not bool)):
        raise ValidationError(f"{path}.{key}: expected {getattr(kind, '__name__', kind)}")
    return val


def _matrix(rows, path):
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise ValidationError(f"{path}: expected a non-empty list of rows")
    width = len(rows[0])
    for i, row in enumerate(rows):
        if len(row) != width:
            raise ValidationError(f"{path}[{i}]: row has {len(row)} entries, expected {width}")
        for j, v in enumerate(row):
            if not isinstance(v, (int, float)) or isinstance(v, bool):
                raise ValidationError(f"{path}[{i}][{j}]: expected a number")
            if v < 0:
                raise ValidationError(f"{path}[{i}][{j}]: nonnegative coefficients required")
    return np.array(rows, dtype=float)


def instance_from_dict(data):
    if not isinstance(data, dict):
        raise ValidationError("$: expected a JSON object")
    if data.get("format") != FORMAT:
        raise ValidationError(f"$.format: expected {FORMAT!r}")
    if data.get("version") != VERSION:
        raise ValidationError(f"$.version: unsupported version {data.get('version')!r}")
    variant = _require(data, "variant", "$", str)
    if variant not in VARIANTS:
        raise ValidationError(f"$.variant: unknown variant {variant!r}")
    n = _require(data, "n", "$", int)
    entry = _require(data, "oracle", "$", dict)
    family = _require(entry, "family", "$.oracle", str)
    if family not in FAMILIES:
        raise ValidationError(f"$.oracle.family: unknown family {family!r}")
    params = _require(entry, "params", "$.oracle", dict)
    try:
        oracle = oracle_from_params(family, params, n if variant != "matching" else None)
    except (InputError, KeyError, TypeError) as exc:
        raise ValidationError(f"$.oracle.params: {exc}") from None

    try:
        if variant == "cardinality":
            if oracle.n != n:
                raise ValidationError(f"$.n: oracle has {oracle.n} items but n = {n}")
            return CardinalityInstance(oracle, _require(data, "k", "$", int))
        if variant == "matching":
            g = _require(data, "graph", "$", dict)
            edges = _require(g, "edges", "$.graph", list)
            for i, e in enumerate(edges):
                if not (isinstance(e, list) and len(e) == 2 and all(isinstance(v, int) for v in e)):
                    raise ValidationError(f"$.graph.edges[{i}]: expected [l, r] integer pair")
            graph = MatchingGraph(_require(g, "n_left", "$.graph", int),
                                  _require(g, "n_right", "$.graph", int), edges)
            if graph.n_left != n:
                raise ValidationError(f"$.n: graph has {graph.n_left} L-vertices but n = {n}")
            if len(graph.edges) != len(edges):
                raise ValidationError("$.graph.edges: duplicate edges")
            return MatchingInstance(graph, oracle)
        A = _matrix(_require(data, "A", "$", list), "$.A")
        b = _require(data, "b", "$", list)
        for i, v in enumerate(b):
            if not isinstance(v, (int, float)) or isinstance(v, bool) or v <= 0:
                raise ValidationError(f"$.b[{i}]: capacities must be positive numbers")
        if oracle.n != n:
            raise ValidationError(f"$.n: oracle has {oracle.n} items but n = {n}")
        if A.shape != (len(b), n):
            raise ValidationError(f"$.A: expected shape ({len(b)}, {n}), got {A.shape}")
        declared = data.get("declared")
        inst = PackingInstance(oracle, A, np.array(b, dtype=float), declared)
        if declared is not None:
            _check_declared(inst, declared)
        return inst
    except ValidationError:
        raise
    except InputError as exc:
        raise ValidationError(f"$: {exc}") from None


def _check_declared(inst, declared):
    if not isinstance(declared, dict):
        raise ValidationError("$.declared: expected an object with B and d")
    B, d = declared.get("B"), declared.get("d")
    actual_B = inst.B
    if B is None and not math.isinf(actual_B) or B is not None and (
            math.isinf(actual_B) or not math.isclose(B, actual_B, rel_tol=1e-9)):
        raise ValidationError(f"$.declared.B: declared {B} but A, b give B = {actual_B}")
    if d != inst.d:
        raise ValidationError(f"$.declared.d: declared {d} but A has column sparsity {inst.d}")


def declare_parameters(inst):
    """Attach the recomputed ``(B, d)`` for the known-parameters variant."""
    inst.declared = {"B": inst.B, "d": inst.d}
    return inst


def save_instance(inst, path):
    text = dumps(instance_to_dict(inst))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def load_instance(path):
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return instance_from_dict(loads(text, str(path)))
