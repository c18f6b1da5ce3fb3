"""Reproducible random-stream derivation.

Every replication gets its own ``numpy.random.Generator`` whose seed is a
pure function of ``(master_seed, replication_index)``.  The mixing function
is SplitMix64 (Steele, Lea & Flood 2014): the master seed is advanced by
``(index + 1)`` golden-ratio increments and finalized with the standard
xor-shift/multiply avalanche.  Because the derivation never depends on
scheduling, results are identical for any degree of parallelism.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(z: int) -> int:
    """One SplitMix64 finalization round of a 64-bit state."""
    z = (z + _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def replication_seed(master_seed: int, replication_index: int) -> int:
    """64-bit stream seed for one replication.

    Defined as ``splitmix64(master_seed + (replication_index + 1) * GOLDEN)``
    reduced mod 2**64.  Distinct indices give statistically independent
    PCG64 streams.
    """
    if replication_index < 0:
        raise ValueError("replication_index must be >= 0")
    state = (int(master_seed) + (replication_index + 1) * _GOLDEN) & _MASK64
    return splitmix64(state)


def stream(master_seed: int, replication_index: int = 0) -> np.random.Generator:
    """PCG64 generator for ``(master_seed, replication_index)``."""
    return np.random.Generator(np.random.PCG64(replication_seed(master_seed, replication_index)))
