"""Seeded random streams.

Every stochastic routine takes an explicit integer seed.  Sub-streams are
derived from ``(seed, key, key, ...)`` through :class:`numpy.random.SeedSequence`
spawn keys and drive a counter-based Philox generator, so a stream depends
only on its key path and never on how much randomness other streams consumed.
"""

import numpy as np


def _sequence(seed, keys):
    if seed < 0:
        raise ValueError("seeds must be non-negative integers")
    return np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in keys))


def stream(seed, *keys):
    """Return an independent generator for the key path ``(seed, *keys)``."""
    return np.random.Generator(np.random.Philox(_sequence(seed, keys)))


def derive_seed(seed, *keys):
    """Collapse a key path into a fresh 63-bit integer seed."""
    lo, hi = _sequence(seed, keys).generate_state(2, np.uint32)
    return (int(hi) << 31) ^ int(lo)
