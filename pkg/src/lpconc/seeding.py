"""Deterministic parallel RNG streams.

Philox is counter based, so a stream keyed by (root seed, chunk index)
produces the same draws no matter which worker executes the chunk or in
which order chunks are scheduled.
"""
from __future__ import annotations

import numpy as np


def generator(*key: int) -> np.random.Generator:
    """Independent generator for a tuple of non-negative integers."""
    if any(k < 0 for k in key):
        raise ValueError("seed components must be non-negative")
    return np.random.Generator(np.random.Philox(seed=np.random.SeedSequence(key)))


def derive_seed(*key: int) -> int:
    """Collapse a key tuple to a single 63-bit seed for nested streams."""
    if any(k < 0 for k in key):
        raise ValueError("seed components must be non-negative")
    state = np.random.SeedSequence(key).generate_state(1, dtype=np.uint64)
    return int(state[0] >> np.uint64(1))
