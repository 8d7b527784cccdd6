import itertools

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from subsecretary.oracles import ConcaveOracle, CoverageOracle, ModularOracle

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def ab_bc():
    # item 0 covers {a, b}, item 1 covers {b, c}; a, b, c = 0, 1, 2
    return CoverageOracle([[0, 1], [1, 2]], [1, 1, 1])


@pytest.fixture
def modular_532():
    return ModularOracle([5, 3, 2])


def random_coverage(rng, n, universe=None):
    universe = universe or max(2, n + 2)
    covers = [rng.choice(universe, size=rng.integers(1, 4), replace=False).tolist() for _ in range(n)]
    return CoverageOracle(covers, rng.integers(1, 10, size=universe).tolist())


def random_concave(rng, n):
    w = np.round(rng.uniform(0.1, 5.0, size=n), 6)
    if rng.random() < 0.5:
        return ConcaveOracle(w, "sqrt")
    return ConcaveOracle(w, "cap", float(np.round(w.sum() * rng.uniform(0.2, 0.8), 6)))


def naive_best(oracle, items, k):
    """Reference optimum: scan every subset of size <= k with plain Python."""
    best = 0.0
    for r in range(min(k, len(items)) + 1):
        for combo in itertools.combinations(sorted(items), r):
            best = max(best, oracle.value(combo, use_cache=False))
    return best


# ---- acceptance reporting ---------------------------------------------------

_CRITERIA = {}


class _Criterion:
    def __init__(self, number, title, limit=None):
        self.number, self.title, self.limit = number, title, limit
        self.details = []

    def note(self, text):
        self.details.append(text)


@pytest.fixture
def criterion():
    """``with criterion(n, title, limit_s) as c:`` records PASS/FAIL and the runtime for criterion n."""
    import contextlib
    import time

    @contextlib.contextmanager
    def open_criterion(number, title, limit=None):
        c = _Criterion(number, title, limit)
        start = time.perf_counter()
        ok = False
        try:
            yield c
            ok = True
        finally:
            elapsed = time.perf_counter() - start
            c.note(f"{elapsed:.1f}s" + (f" (limit {limit}s)" if limit else ""))
            if ok and limit is not None and elapsed > limit:
                ok = False
            _CRITERIA[number] = (ok, c)
            print(f"criterion {number} {'PASS' if ok else 'FAIL'}: {title} | " + "; ".join(c.details))
        if limit is not None:
            assert elapsed <= limit, f"criterion {number} took {elapsed:.1f}s, limit {limit}s"

    return open_criterion


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        ok, c = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number} {'PASS' if ok else 'FAIL'}: {c.title} | "
                                    + "; ".join(c.details))
