"""Deterministic seed derivation.

Every stochastic operation owns a sub-stream derived from (seed, *key), so
results are reproducible bit-for-bit regardless of execution order or
parallel scheduling.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def spawn_rng(seed: int, *key: int) -> np.random.Generator:
    """Return an independent PCG64 stream for (seed, *key)."""
    return np.random.default_rng(np.random.SeedSequence([seed & _MASK64, *key]))


def derive_seed(seed: int, *key: int) -> int:
    """Collapse (seed, *key) into a fresh 64-bit seed."""
    ss = np.random.SeedSequence([seed & _MASK64, *key])
    return int(ss.generate_state(1, np.uint64)[0])
