"""Fenwick (binary indexed) tree over per-vertex attachment weights.

Supports O(log n) point updates, prefix sums, and inverse-prefix descent,
which is all the attachment sampler needs.  Weights are floats; additive
updates accumulate rounding drift, so the tree rebuilds itself exactly
from the leaf values every ``REBUILD_INTERVAL`` updates, keeping the
prefix sums within 1e-9 relative error of the true totals.
"""

from __future__ import annotations

import numpy as np

REBUILD_INTERVAL = 1 << 20
DRIFT_TOLERANCE = 1e-9


class PrefixWeightTree:
    """Fenwick tree with capacity fixed at construction.

    Indices are 0-based externally.  Leaves beyond the current logical
    size simply hold weight zero.
    """

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.capacity = capacity
        self._tree = [0.0] * (capacity + 1)
        self._leaf = [0.0] * capacity
        self._total = 0.0
        self._updates_since_rebuild = 0
        # highest power of two <= capacity, for the descent
        self._top_bit = 1 << (capacity.bit_length() - 1)
        if self._top_bit > capacity:
            self._top_bit >>= 1

    def __len__(self) -> int:
        return self.capacity

    @property
    def total(self) -> float:
        return self._total

    def add(self, i: int, delta: float) -> None:
        """Add ``delta`` to the weight of index ``i``."""
        self._leaf[i] += delta
        self._total += delta
        tree = self._tree
        j = i + 1
        cap = self.capacity
        while j <= cap:
            tree[j] += delta
            j += j & (-j)
        self._updates_since_rebuild += 1
        if self._updates_since_rebuild >= REBUILD_INTERVAL:
            self.rebuild()

    def set(self, i: int, value: float) -> None:
        self.add(i, value - self._leaf[i])

    def get(self, i: int) -> float:
        return self._leaf[i]

    def prefix(self, i: int) -> float:
        """Sum of weights at indices 0..i inclusive."""
        s = 0.0
        tree = self._tree
        j = i + 1
        while j > 0:
            s += tree[j]
            j -= j & (-j)
        return s

    def pick(self, u: float) -> int:
        """Smallest index i with prefix(i) > u, for u in [0, total).

        Classic power-of-two descent; O(log capacity).
        """
        pos = 0
        bit = self._top_bit
        tree = self._tree
        cap = self.capacity
        while bit:
            nxt = pos + bit
            if nxt <= cap and tree[nxt] <= u:
                u -= tree[nxt]
                pos = nxt
            bit >>= 1
        if pos >= cap:
            raise ValueError("pick target exceeds total weight (u too large)")
        return pos

    def rebuild(self, values=None) -> None:
        """Recompute the internal sums exactly from leaf values."""
        if values is not None:
            if len(values) > self.capacity:
                raise ValueError("more values than capacity")
            leaf = [0.0] * self.capacity
            leaf[: len(values)] = [float(v) for v in values]
            self._leaf = leaf
        # exact pairwise-summed total, then the standard O(n) Fenwick build:
        # processing j in increasing order, every node has already absorbed
        # its children when it pushes to its parent.
        self._total = float(np.sum(np.asarray(self._leaf, dtype=float)))
        tree = self._tree
        cap = self.capacity
        leaf = self._leaf
        for j in range(cap + 1):
            tree[j] = 0.0
        for j in range(1, cap + 1):
            tree[j] += leaf[j - 1]
            parent = j + (j & (-j))
            if parent <= cap:
                tree[parent] += tree[j]
        self._updates_since_rebuild = 0

    def drift(self) -> float:
        """Relative gap between the tree total and the exact leaf sum."""
        exact = float(np.sum(np.asarray(self._leaf, dtype=float)))
        if exact == 0.0:
            return abs(self._total)
        return abs(self._total - exact) / exact
