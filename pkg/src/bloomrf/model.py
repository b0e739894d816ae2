"""Analytical false-positive model for uniformly distributed keys.

Intervals on the bottom level of every layer are classified as true
positives (contain a key), false positives (reported non-empty without a
key) and true negatives.  Counts are propagated top-down: children of an
empty interval are empty, children of a non-empty one survive the layer's
probe with probability ``beta ** k``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List

from .config import FilterConfig


@dataclass(frozen=True)
class LayerStats:
    layer: int
    level: int
    tp: float
    fp: float
    tn: float
    fp_pot: float  # potential false positives handed to the next layer
    beta: float
    fpr: float


def true_positives(n: int, level: int) -> float:
    return float(min(n, 1 << level))


def estimate_fill_rate(config: FilterConfig, n: int, segment: int) -> float:
    """Probability that a bit of ``segment`` not backed by a key is set."""
    if config.exact_layer and config.segment_of[0] == segment:
        return 0.0
    lay = config.layout
    writes = sum(config.k[i] * true_positives(n, lay.bottom_levels[i])
                 for i in config.probed_layers if config.segment_of[i] == segment)
    m = config.segment_bits[segment]
    return -math.expm1(writes * math.log1p(-1.0 / m))


def pass_probabilities(config: FilterConfig, n: int) -> List[float]:
    """Per layer, probability that an empty bottom-level interval still reads as set."""
    betas = [estimate_fill_rate(config, n, j) for j in range(len(config.segment_bits))]
    out = [0.0]
    for i in range(1, config.L + 1):
        if i < config.start_layer:
            out.append(1.0)  # skipped layers are never probed
        else:
            out.append(betas[config.segment_of[i]] ** config.k[i])
    return out


def estimate_layer_stats(config: FilterConfig, n: int) -> List[LayerStats]:
    lay = config.layout
    levels = lay.bottom_levels
    betas = [estimate_fill_rate(config, n, j) for j in range(len(config.segment_bits))]
    passes = pass_probabilities(config, n)

    # without an exact layer, seed from the root interval (level 0)
    tp = true_positives(n, levels[0])
    fp = 0.0
    tn = float(1 << levels[0]) - tp
    rows = []
    for i in range(lay.L + 1):
        beta = 0.0 if i == 0 else betas[config.segment_of[i]]
        if i < lay.L:
            fan = float(1 << lay.heights[i + 1])
            tp_next = true_positives(n, levels[i + 1])
            fp_pot = fan * (fp + tp) - tp_next
        else:
            fp_pot = 0.0
        fpr = fp / (fp + tn) if fp + tn > 0 else 0.0
        rows.append(LayerStats(i, levels[i], tp, fp, tn, fp_pot, beta, fpr))
        if i < lay.L:
            pa = passes[i + 1]
            tn = fan * tn + (1.0 - pa) * fp_pot
            fp = pa * fp_pot
            tp = tp_next
    return rows


def estimate_point_fpr(config: FilterConfig, n: int) -> float:
    """Probability that an absent uniformly drawn key passes every probe.

    Sums over the deepest layer ``t`` whose interval around the probe still
    holds a key; every probed layer below ``t`` must then pass by chance.
    Reduces to ``occupancy(exact) * prod(beta_i ** k_i)`` when layers below
    the exact one are sparse.
    """
    lay = config.layout
    L = lay.L
    if n == 0:
        return 0.0
    q = [true_positives(n, lv) / float(1 << lv) for lv in lay.bottom_levels] + [0.0]
    passes = pass_probabilities(config, n)
    total = 0.0
    tail = 1.0  # product of passes[t+1..L]
    for t in range(L - 1, -1, -1):
        tail *= passes[t + 1]
        total += (q[t] - q[t + 1]) * tail
    absent = 1.0 - q[L]
    return total / absent if absent > 0 else 0.0


def level_fpr(config: FilterConfig, n: int, level: int, stats: List[LayerStats] = None) -> float:
    """Approximate FPR of dyadic intervals on an arbitrary ``level``.

    Inside layer ``i`` a level-``l`` interval owns ``2**(l_i - l)`` trace
    positions and reads as set if any of them is; positions are treated as
    independent.  Exact at layer bottom levels, approximate in between.
    """
    lay = config.layout
    levels = lay.bottom_levels
    if level <= levels[0]:
        return 0.0
    if stats is None:
        stats = estimate_layer_stats(config, n)
    i = next(i for i in range(1, lay.L + 1) if levels[i] >= level)
    above = stats[i - 1]
    pa = pass_probabilities(config, n)[i]
    group = 1 << (levels[i] - level)
    p_any = -math.expm1(group * math.log1p(-pa)) if pa < 1.0 else 1.0
    tp = true_positives(n, level)
    fp_pot = float(1 << (level - above.level)) * (above.fp + above.tp) - tp
    fp = p_any * fp_pot
    tn = float(1 << (level - above.level)) * above.tn + (1.0 - p_any) * fp_pot
    return fp / (fp + tn) if fp + tn > 0 else 0.0


def max_level_fpr(config: FilterConfig, n: int, range_hint: int = None) -> float:
    """Largest level FPR over the levels a query of ``2**range_hint`` keys decomposes into."""
    d = config.d
    if range_hint is None:
        range_hint = d
    stats = estimate_layer_stats(config, n)
    lowest = max(1, d - range_hint)
    return max(level_fpr(config, n, lv, stats) for lv in range(lowest, d + 1))


def choose_start_layer(config: FilterConfig, n: int, cutoff: float = 0.9) -> FilterConfig:
    """Skip top hashed layers whose traces are predicted to read mostly ones.

    A layer is saturated when a random trace position is set with
    probability above ``cutoff`` (own keys plus overlap noise).  Skipped
    layers write nothing, which lowers the fill rate of the rest, so the
    estimate is repeated after each skip.
    """
    lay = config.layout
    start = 1
    while start < lay.L:
        cfg = config.replace(start_layer=start)
        pa = pass_probabilities(cfg, n)[start]
        q = true_positives(n, lay.bottom_levels[start]) / float(1 << lay.bottom_levels[start])
        if q + (1.0 - q) * pa <= cutoff:
            break
        start += 1
    return config.replace(start_layer=max(start, 1))
