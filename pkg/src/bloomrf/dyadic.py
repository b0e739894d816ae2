"""Arithmetic over the canonical dyadic interval scheme of a d-bit domain.

Level ``l`` intervals span ``2**(d - l)`` keys and are aligned to that size.
Layer 0 is the (optional) exact top layer, layer ``L`` the leaf layer.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from .errors import LayerOutOfRange, LevelOutOfRange, NoIntersection, SumMismatch, ZeroHeight

DOMAIN_WIDTHS = (8, 16, 32, 64)


@dataclass(frozen=True)
class DyadicInterval:
    level: int
    lo: int
    hi: int

    @property
    def size(self) -> int:
        return self.hi - self.lo + 1

    def __contains__(self, key: int) -> bool:
        return self.lo <= key <= self.hi


@dataclass(frozen=True)
class LayerLayout:
    """Derived geometry of a Dyadic Trace-Tree.

    ``trace_bits[i]`` and ``tt_counts[i]`` are ``None`` for layer 0, which
    has no trace (it is either absent or stored as an exact bitmap).
    """

    d: int
    heights: Tuple[int, ...]
    bottom_levels: Tuple[int, ...]
    trace_bits: Tuple[Optional[int], ...]
    tt_counts: Tuple[Optional[int], ...]
    tt_max: int

    @property
    def L(self) -> int:
        return len(self.heights) - 1

    @property
    def has_exact(self) -> bool:
        return self.heights[0] > 0

    def shift(self, layer: int) -> int:
        """Number of low key bits below the bottom level of ``layer``."""
        return self.d - self.bottom_levels[layer]

    def tt_shift(self, layer: int) -> int:
        """Number of low key bits spanned by one Trace-Tree of ``layer``."""
        return self.d - self.bottom_levels[layer - 1] - 1

    def trace_size(self, layer: int) -> int:
        return 1 << self.trace_bits[layer]


def build_layout(d: int, heights: Sequence[int]) -> LayerLayout:
    if d not in DOMAIN_WIDTHS:
        raise ValueError(f"domain width must be one of {DOMAIN_WIDTHS}, got {d}")
    heights = tuple(int(h) for h in heights)
    if not heights:
        raise ValueError("height vector must not be empty")
    if heights[0] < 0:
        raise ValueError("exact-layer height must be non-negative")
    if sum(heights) != d:
        raise SumMismatch(f"heights {heights} sum to {sum(heights)}, expected {d}")
    for i, h in enumerate(heights[1:], start=1):
        if h < 1:
            raise ZeroHeight(f"layer {i} has height {h}")

    levels = []
    acc = 0
    for h in heights:
        acc += h
        levels.append(acc)
    trace_bits: List[Optional[int]] = [None] + [h - 1 for h in heights[1:]]
    tt_counts: List[Optional[int]] = [None] + [1 << (levels[i - 1] + 1) for i in range(1, len(heights))]
    tt_max = sum(c for c in tt_counts if c is not None)
    return LayerLayout(d, heights, tuple(levels), tuple(trace_bits), tuple(tt_counts), tt_max)


def covering_interval(key: int, level: int, d: int) -> DyadicInterval:
    if not 0 <= level <= d:
        raise LevelOutOfRange(f"level {level} outside [0, {d}]")
    span = d - level
    lo = (key >> span) << span
    return DyadicInterval(level, lo, lo + (1 << span) - 1)


def dyadic_decompose(lo: int, hi: int, d: int) -> List[DyadicInterval]:
    """Exact, maximal decomposition of ``[lo, hi]`` in ascending key order."""
    if lo > hi:
        raise ValueError(f"empty range [{lo}, {hi}]")
    out = []
    while lo <= hi:
        # largest aligned block starting at lo that still fits
        span = (lo & -lo).bit_length() - 1 if lo else d
        while lo + (1 << span) - 1 > hi:
            span -= 1
        out.append(DyadicInterval(d - span, lo, lo + (1 << span) - 1))
        lo += 1 << span
    return out


def position_span(layout: LayerLayout, layer: int, lo: int, hi: int) -> Tuple[int, int]:
    """Trace positions of the bottom-level intervals holding ``lo`` and ``hi``.

    Both keys must lie in the same Trace-Tree of ``layer``.
    """
    s = layout.shift(layer)
    w = (1 << layout.trace_bits[layer]) - 1
    return (lo >> s) & w, (hi >> s) & w


def span_mask(p_lo: int, p_hi: int) -> int:
    """Element mask with bits ``p_lo..p_hi`` set (bit p = trace position p)."""
    return ((2 << p_hi) - 1) ^ ((1 << p_lo) - 1)


def trace_bitmask(layout: LayerLayout, layer: int, any_key_in_tt: int, lo: int, hi: int) -> int:
    """Mask of the trace positions of one Trace-Tree intersecting ``[lo, hi]``.

    The returned integer reads like a trace drawn left to right: written as a
    ``2**b``-digit binary string, its first digit is trace position 0.  In the
    d=8, heights=(0, 4, 4) example, the range [190, 204] on the layer-1 tree
    over [128, 255] gives ``0b00011000``.  The bit-array stores position p at
    bit offset p; see :func:`span_mask` for that orientation.
    """
    if not 1 <= layer <= layout.L:
        raise LayerOutOfRange(f"layer {layer} outside [1, {layout.L}]")
    t = layout.tt_shift(layer)
    tt_lo = (any_key_in_tt >> t) << t
    tt_hi = tt_lo + (1 << t) - 1
    clo, chi = max(lo, tt_lo), min(hi, tt_hi)
    if clo > chi:
        raise NoIntersection(f"[{lo}, {hi}] misses trace-tree [{tt_lo}, {tt_hi}]")
    p_lo, p_hi = position_span(layout, layer, clo, chi)
    top = (1 << layout.trace_bits[layer]) - 1
    return span_mask(top - p_hi, top - p_lo)
