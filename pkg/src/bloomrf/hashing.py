"""Piecewise-monotone hashing (PMHF) and replicating hash functions.

For layer ``i`` a key is cut into three parts::

    | selector (hashed) | offset (b_i bits) | s_i = d - l_i low bits (dropped) |

The selector names the Trace-Tree, the offset names the trace position.  The
selector is hashed to a trace-aligned element of the layer's segment and the
offset is added unchanged, so keys inside one trace land on consecutive bits.
"""
from __future__ import annotations

from functools import lru_cache
from typing import List, NamedTuple, Tuple

import numpy as np

from .config import MASK64, MAX_REPLICAS, FilterConfig
from .errors import LayerOutOfRange, NoExactLayer, ReplicaOutOfRange

# bump together with the serialization format version if the table changes
PRIME_TABLE_VERSION = 1
_GAMMA = 0x9E3779B97F4A7C15


def splitmix64(z: int) -> int:
    z = (z + _GAMMA) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


class BitPosition(NamedTuple):
    segment: int
    bit: int


class HashFamily:
    """Multiply-add hashes ``H_{i,r}(x) = P1*x + P2 mod 2**64``.

    Constants come from a counter-based splitmix64 stream keyed by the seed,
    so the table is reproducible from the seed alone.  Multipliers are odd.
    ``reduce`` maps a hash value onto ``[0, n)`` by multiply-shift.
    """

    def __init__(self, seed: int):
        self.seed = seed & MASK64

    def pair(self, layer: int, replica: int) -> Tuple[int, int]:
        return _pair(self.seed, layer, replica)

    def __call__(self, layer: int, replica: int, x: int) -> int:
        p1, p2 = _pair(self.seed, layer, replica)
        return (p1 * x + p2) & MASK64

    @staticmethod
    def reduce(h: int, n: int) -> int:
        return (h * n) >> 64


@lru_cache(maxsize=4096)
def _pair(seed: int, layer: int, replica: int) -> Tuple[int, int]:
    idx = layer * MAX_REPLICAS + replica
    p1 = splitmix64((seed + (2 * idx + 1) * _GAMMA) & MASK64) | 1
    p2 = splitmix64((seed + (2 * idx + 2) * _GAMMA) & MASK64)
    return p1, p2


def _check(config: FilterConfig, layer: int, replica: int):
    if not 1 <= layer <= config.L:
        raise LayerOutOfRange(f"layer {layer} outside [1, {config.L}]")
    if not 0 <= replica < config.k[layer]:
        raise ReplicaOutOfRange(f"replica {replica} outside [0, {config.k[layer]})")


def mh(config: FilterConfig, layer: int, replica: int, key: int) -> BitPosition:
    _check(config, layer, replica)
    lay = config.layout
    b = lay.trace_bits[layer]
    key_i = key >> lay.shift(layer)
    offset = key_i & ((1 << b) - 1)
    selector = key_i >> b
    j = config.segment_of[layer]
    elements = config.segment_bits[j] >> b
    p1, p2 = _pair(config.seed, layer, replica)
    elem = (((p1 * selector + p2) & MASK64) * elements) >> 64
    return BitPosition(j, (elem << b) + offset)


def exact_position(config: FilterConfig, key: int) -> BitPosition:
    lay = config.layout
    if not lay.has_exact:
        raise NoExactLayer("configuration has no exact layer")
    return BitPosition(config.segment_of[0], key >> lay.shift(0))


def positions_for(config: FilterConfig, key: int) -> List[BitPosition]:
    """All bits written for ``key``: exact bit first, then every probed layer and replica."""
    out = []
    if config.exact_layer:
        out.append(exact_position(config, key))
    for i in config.probed_layers:
        for r in range(config.k[i]):
            out.append(mh(config, i, r, key))
    return out


def mh_many(config: FilterConfig, layer: int, replica: int, keys: np.ndarray) -> np.ndarray:
    """Vectorised :func:`mh` returning segment bit indices as uint64."""
    _check(config, layer, replica)
    lay = config.layout
    b = lay.trace_bits[layer]
    keys = np.asarray(keys, dtype=np.uint64)
    key_i = keys >> np.uint64(lay.shift(layer))
    offset = key_i & np.uint64((1 << b) - 1)
    selector = key_i >> np.uint64(b)
    elements = np.uint64(config.segment_bits[config.segment_of[layer]] >> b)
    p1, p2 = _pair(config.seed, layer, replica)
    h = selector * np.uint64(p1) + np.uint64(p2)  # wraps mod 2**64
    return (mulhi64(h, elements) << np.uint64(b)) + offset


_LO32 = np.uint64(0xFFFFFFFF)
_S32 = np.uint64(32)


def mulhi64(a, b) -> np.ndarray:
    """High 64 bits of the 128-bit product of uint64 operands."""
    a = np.asarray(a, dtype=np.uint64)
    b = np.asarray(b, dtype=np.uint64)
    a_lo, a_hi = a & _LO32, a >> _S32
    b_lo, b_hi = b & _LO32, b >> _S32
    lh = a_lo * b_hi
    hl = a_hi * b_lo
    mid = ((a_lo * b_lo) >> _S32) + (lh & _LO32) + (hl & _LO32)
    return a_hi * b_hi + (lh >> _S32) + (hl >> _S32) + (mid >> _S32)
