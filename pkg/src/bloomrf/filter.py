"""The bloomRF filter: segmented bit storage, insert, point and range lookup."""
from __future__ import annotations

import threading
from array import array
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .config import MASK64, FilterConfig
from .hashing import _pair, mh_many
from .errors import InvalidRange


@dataclass
class Occupancy:
    segment_fill: List[float]
    # mean set bits per non-empty trace element; None for layer 0 and skipped layers
    trace_occupation: List[Optional[float]]


class _Probe:
    """Precomputed constants for probing one hashed layer."""

    __slots__ = ("layer", "shift", "b", "width", "pos_mask", "elem_mask", "words", "view",
                 "elements", "pairs", "tt_shift", "segment")

    def __init__(self, f: "Filter", layer: int):
        cfg = f.config
        lay = cfg.layout
        self.layer = layer
        self.shift = lay.shift(layer)
        self.b = lay.trace_bits[layer]
        self.width = 1 << self.b
        self.pos_mask = self.width - 1
        self.elem_mask = (1 << self.width) - 1
        self.segment = cfg.segment_of[layer]
        self.words = f.segments[self.segment]
        self.view = f._views[self.segment]
        self.elements = cfg.segment_bits[self.segment] >> self.b
        self.pairs = tuple(_pair(cfg.seed, layer, r) for r in range(cfg.k[layer]))
        self.tt_shift = lay.tt_shift(layer)


class Filter:
    """Approximate point/range membership filter over d-bit unsigned keys.

    Inserts and lookups may run concurrently from several threads.  Writers
    serialise on an internal lock and only ever OR bits into 64-bit words;
    readers take no lock.  A lookup started after an insert returned sees
    all of that insert's bits.
    """

    def __init__(self, config: FilterConfig):
        self.config = config
        self.key_count = 0
        self.segments = [array("Q", bytes(8 * ((m + 63) // 64))) for m in config.segment_bits]
        self._views = [np.frombuffer(s, dtype=np.uint64) for s in self.segments]
        self._lock = threading.Lock()
        lay = config.layout
        self._max_key = (1 << lay.d) - 1
        if lay.has_exact:
            self._exact = self.segments[config.segment_of[0]]
            self._exact_shift = lay.shift(0)
        else:
            self._exact = None
            self._exact_shift = 0
        self._probes = [_Probe(self, i) for i in config.probed_layers]
        self._probe_of = {p.layer: p for p in self._probes}
        self._threshold = config.early_stop_threshold

    # -- writes ---------------------------------------------------------

    def _bits_for(self, key: int):
        out = []
        if self._exact is not None:
            out.append((self._exact, key >> self._exact_shift))
        for p in self._probes:
            ki = key >> p.shift
            off = ki & p.pos_mask
            sel = ki >> p.b
            for p1, p2 in p.pairs:
                out.append((p.words, (((((p1 * sel + p2) & MASK64) * p.elements) >> 64) << p.b) + off))
        return out

    def insert(self, key: int) -> None:
        self._check_key(key)
        bits = self._bits_for(key)
        with self._lock:
            for words, bit in bits:
                words[bit >> 6] |= 1 << (bit & 63)
            self.key_count += 1

    def insert_many(self, keys) -> None:
        keys = np.asarray(keys, dtype=np.uint64).ravel()
        if keys.size == 0:
            return
        if self.config.d < 64 and int(keys.max()) > self._max_key:
            raise ValueError(f"key outside the {self.config.d}-bit domain")
        updates = []
        if self._exact is not None:
            updates.append((self._views[self.config.segment_of[0]], keys >> np.uint64(self._exact_shift)))
        for p in self._probes:
            for r in range(len(p.pairs)):
                updates.append((p.view, mh_many(self.config, p.layer, r, keys)))
        with self._lock:
            for view, bits in updates:
                np.bitwise_or.at(view, bits >> np.uint64(6), np.uint64(1) << (bits & np.uint64(63)))
            self.key_count += int(keys.size)

    # -- point lookup ---------------------------------------------------

    def point_lookup(self, key: int) -> bool:
        self._check_key(key)
        ex = self._exact
        if ex is not None:
            i = key >> self._exact_shift
            if not (ex[i >> 6] >> (i & 63)) & 1:
                return False
        for p in self._probes:
            ki = key >> p.shift
            off = ki & p.pos_mask
            sel = ki >> p.b
            words = p.words
            for p1, p2 in p.pairs:
                bit = (((((p1 * sel + p2) & MASK64) * p.elements) >> 64) << p.b) + off
                if not (words[bit >> 6] >> (bit & 63)) & 1:
                    return False
        return True

    __contains__ = point_lookup

    def point_lookup_many(self, keys) -> np.ndarray:
        keys = np.asarray(keys, dtype=np.uint64).ravel()
        hit = np.ones(keys.shape, dtype=bool)
        one = np.uint64(1)
        if self._exact is not None:
            bits = keys >> np.uint64(self._exact_shift)
            view = self._views[self.config.segment_of[0]]
            hit &= ((view[bits >> np.uint64(6)] >> (bits & np.uint64(63))) & one).astype(bool)
        for p in self._probes:
            for r in range(len(p.pairs)):
                bits = mh_many(self.config, p.layer, r, keys)
                hit &= ((p.view[bits >> np.uint64(6)] >> (bits & np.uint64(63))) & one).astype(bool)
        return hit

    # -- range lookup ---------------------------------------------------

    def _element(self, p: _Probe, sel: int) -> int:
        """AND of the trace elements of all replicas for Trace-Tree ``sel``."""
        acc = p.elem_mask
        words = p.words
        for p1, p2 in p.pairs:
            base = ((((p1 * sel + p2) & MASK64) * p.elements) >> 64) << p.b
            acc &= words[base >> 6] >> (base & 63)
        return acc & p.elem_mask

    def range_lookup(self, lo: int, hi: int, trace: Optional[list] = None) -> bool:
        """True unless ``[lo, hi]`` is certainly empty.

        Walks the Trace-Tree layers depth-first in ascending key order,
        pruning sub-intervals whose trace bits are clear.  If ``trace`` is a
        list, one ``(layer, tt_lo, tt_hi)`` tuple is appended per fetched
        trace element.
        """
        if lo > hi:
            raise InvalidRange(f"lo={lo} > hi={hi}")
        self._check_key(lo)
        self._check_key(hi)
        stack = []
        first = self._probes[0].layer if self._probes else None

        ex = self._exact
        if ex is not None:
            s = self._exact_shift
            a, b = lo >> s, hi >> s
            full_lo = a if (lo & ((1 << s) - 1)) == 0 else a + 1
            full_hi = b if ((hi + 1) & ((1 << s) - 1)) == 0 else b - 1
            if full_lo <= full_hi and _any_bit(ex, self._views[self.config.segment_of[0]], full_lo, full_hi):
                return True
            for c in (b, a) if a != b else (a,):
                if full_lo <= c <= full_hi:
                    continue
                if (ex[c >> 6] >> (c & 63)) & 1:
                    if first is None:
                        return True
                    stack.append((first, max(lo, c << s), min(hi, ((c + 1) << s) - 1)))
            if not stack:
                return False
        else:
            stack.append((first, lo, hi))

        probe_of = self._probe_of
        last = self.config.L
        threshold = self._threshold
        while stack:
            layer, qlo, qhi = stack.pop()
            p = probe_of[layer]
            t = p.tt_shift
            tt_lo = (qlo >> t) << t
            tt_hi = tt_lo + (1 << t) - 1
            if qhi > tt_hi:
                stack.append((layer, tt_hi + 1, qhi))
                qhi = tt_hi
            s = p.shift
            p_lo = (qlo >> s) & p.pos_mask
            p_hi = (qhi >> s) & p.pos_mask
            mask = ((2 << p_hi) - 1) ^ ((1 << p_lo) - 1)
            if trace is not None:
                trace.append((layer, tt_lo, tt_hi))
            hit = self._element(p, qlo >> t) & mask
            if not hit:
                continue
            if threshold is not None and hit.bit_count() > threshold:
                return True
            if layer == last:
                return True
            # push children high-to-low so the lowest is explored first
            while hit:
                pos = hit.bit_length() - 1
                hit ^= 1 << pos
                c_lo = tt_lo + (pos << s)
                stack.append((layer + 1, max(qlo, c_lo), min(qhi, c_lo + (1 << s) - 1)))
        return False

    # -- statistics -----------------------------------------------------

    def occupancy(self) -> Occupancy:
        fill = []
        for view, m in zip(self._views, self.config.segment_bits):
            fill.append(int(np.bitwise_count(view).sum()) / m)
        occ: List[Optional[float]] = [None] * (self.config.L + 1)
        for p in self._probes:
            bits = np.unpackbits(p.view.view(np.uint8), bitorder="little")
            bits = bits[: self.config.segment_bits[p.segment]]
            counts = bits.reshape(-1, p.width).sum(axis=1)
            nz = counts[counts > 0]
            occ[p.layer] = float(nz.mean()) if nz.size else 0.0
        return Occupancy(fill, occ)

    def popcount(self) -> int:
        return sum(int(np.bitwise_count(v).sum()) for v in self._views)

    def _check_key(self, key: int):
        if not 0 <= key <= self._max_key:
            raise ValueError(f"key {key} outside the {self.config.d}-bit domain")

    def __repr__(self):
        lay = self.config.layout
        return (f"Filter(d={lay.d}, heights={lay.heights}, bits={self.config.total_bits}, "
                f"keys={self.key_count})")


def create(config: FilterConfig) -> Filter:
    return Filter(config)


def _any_bit(words, view, a: int, b: int) -> bool:
    """Whether any bit with index in ``[a, b]`` is set."""
    wa, wb = a >> 6, b >> 6
    if wa == wb:
        return bool((words[wa] >> (a & 63)) & ((2 << (b - a)) - 1))
    if words[wa] >> (a & 63):
        return True
    if words[wb] & ((2 << (b & 63)) - 1):
        return True
    return wb - wa > 1 and bool(view[wa + 1:wb].any())
