"""Deterministic seed derivation.

Every random stream in the package descends from one master seed through
:func:`derive_seed`, so work can be split across processes without changing
results.
"""
from __future__ import annotations

import numpy as np


def derive_seed(seed: int, *keys: int) -> int:
    """Stable 63-bit child seed of ``seed`` for the path ``keys``."""
    ss = np.random.SeedSequence(entropy=int(seed) & ((1 << 128) - 1), spawn_key=tuple(int(k) for k in keys))
    lo, hi = ss.generate_state(2, dtype=np.uint32)
    return ((int(hi) << 32) | int(lo)) & ((1 << 63) - 1)


def rng_for(seed: int, *keys: int) -> np.random.Generator:
    return np.random.default_rng(derive_seed(seed, *keys))
