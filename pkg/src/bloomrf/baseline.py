"""Plain Bloom filter, used only as a point-query FPR reference."""
from __future__ import annotations

import math

import numpy as np

from .hashing import mulhi64

_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)


def _mix(x: np.ndarray) -> np.ndarray:
    x = (x ^ (x >> np.uint64(30))) * _M1
    x = (x ^ (x >> np.uint64(27))) * _M2
    return x ^ (x >> np.uint64(31))


class BloomFilter:
    """Bloom filter over 64-bit keys with double hashing (Kirsch-Mitzenmacher)."""

    def __init__(self, m: int, k: int, seed: int = 0):
        self.m = int(m)
        self.k = int(k)
        self.seed = np.uint64(seed)
        self.words = np.zeros((self.m + 63) // 64, dtype=np.uint64)

    @classmethod
    def for_budget(cls, n: int, bits_per_key: float, seed: int = 0) -> "BloomFilter":
        m = max(64, int(n * bits_per_key))
        k = max(1, round(bits_per_key * math.log(2)))
        return cls(m, k, seed)

    def _bits(self, keys: np.ndarray):
        h1 = _mix(keys ^ self.seed)
        h2 = _mix(h1 + np.uint64(0x9E3779B97F4A7C15)) | np.uint64(1)
        m = np.uint64(self.m)
        for i in range(self.k):
            yield mulhi64(h1 + np.uint64(i) * h2, m)

    def insert_many(self, keys) -> None:
        keys = np.asarray(keys, dtype=np.uint64)
        for bits in self._bits(keys):
            np.bitwise_or.at(self.words, bits >> np.uint64(6), np.uint64(1) << (bits & np.uint64(63)))

    def contains_many(self, keys) -> np.ndarray:
        keys = np.asarray(keys, dtype=np.uint64)
        hit = np.ones(keys.shape, dtype=bool)
        for bits in self._bits(keys):
            hit &= ((self.words[bits >> np.uint64(6)] >> (bits & np.uint64(63))) & np.uint64(1)).astype(bool)
        return hit

    def expected_fpr(self, n: int) -> float:
        return (1.0 - math.exp(-self.k * n / self.m)) ** self.k
