"""Exact reference set used as ground truth."""
from __future__ import annotations

import numpy as np

from .errors import InvalidRange


class ExactSet:
    """Sorted, deduplicated keys answering emptiness questions by binary search."""

    def __init__(self, keys=()):
        self.keys = np.unique(np.asarray(keys, dtype=np.uint64))

    def __len__(self):
        return int(self.keys.size)

    def point(self, key: int) -> bool:
        i = int(np.searchsorted(self.keys, np.uint64(key)))
        return i < self.keys.size and int(self.keys[i]) == key

    def range(self, lo: int, hi: int) -> bool:
        if lo > hi:
            raise InvalidRange(f"lo={lo} > hi={hi}")
        i = int(np.searchsorted(self.keys, np.uint64(lo)))
        return i < self.keys.size and int(self.keys[i]) <= hi

    def point_many(self, keys) -> np.ndarray:
        keys = np.asarray(keys, dtype=np.uint64)
        i = np.searchsorted(self.keys, keys)
        found = np.zeros(keys.shape, dtype=bool)
        ok = i < self.keys.size
        found[ok] = self.keys[i[ok]] == keys[ok]
        return found

    def range_many(self, lo, hi) -> np.ndarray:
        lo = np.asarray(lo, dtype=np.uint64)
        hi = np.asarray(hi, dtype=np.uint64)
        if np.any(lo > hi):
            raise InvalidRange("some lo > hi")
        i = np.searchsorted(self.keys, lo)
        found = np.zeros(lo.shape, dtype=bool)
        ok = i < self.keys.size
        found[ok] = self.keys[i[ok]] <= hi[ok]
        return found


def oracle_point(s: ExactSet, key: int) -> bool:
    return s.point(key)


def oracle_range(s: ExactSet, lo: int, hi: int) -> bool:
    return s.range(lo, hi)
