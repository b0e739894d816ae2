"""Tuning advisor: pick a configuration for ``n`` keys under a bit budget."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

from .config import DEFAULT_SEED, FilterConfig, basic_config
from .dyadic import build_layout
from .errors import BudgetTooSmall
from .model import choose_start_layer, estimate_point_fpr, max_level_fpr

MIN_BITS_PER_KEY = 8
SEGMENTED_BITS_PER_KEY = 16  # below this the basic filter is used
EXACT_SHARE = 0.6
MID_HEIGHTS = (2, 2, 4)
MID_K = (2, 1, 1)
LOW_HEIGHT = 7


@dataclass(frozen=True)
class AdvisorInput:
    n: int
    m: int
    range_hint: Optional[int] = None  # log2 of the largest expected query range
    C: float = 4.0
    d: int = 64
    seed: int = DEFAULT_SEED
    saturation_cutoff: float = 0.9


@dataclass(frozen=True)
class AdvisorResult:
    config: FilterConfig
    fpr_m: float
    fpr_p: float
    fpr_w: float
    basic: bool


def template(d: int, exact_level: int) -> Tuple[Tuple[int, ...], Tuple[int, ...], Tuple[int, ...]]:
    """Heights, hash counts and segment ids for a given exact level.

    Exact layer in segment 0, the (2, 2, 4) middle layers in segment 1 and
    height-7 lower layers in segment 2; the leaf takes whatever remains.
    """
    rest = d - exact_level - sum(MID_HEIGHTS)
    if rest < 1:
        raise ValueError(f"exact level {exact_level} leaves no room below the middle layers")
    low = (LOW_HEIGHT,) * (rest // LOW_HEIGHT)
    if rest % LOW_HEIGHT:
        low += (rest % LOW_HEIGHT,)
    heights = (exact_level,) + MID_HEIGHTS + low
    k = (0,) + MID_K + (1,) * len(low)
    seg = (0,) + (1,) * len(MID_HEIGHTS) + (2,) * len(low)
    return heights, k, seg


def evaluate(config: FilterConfig, inp: AdvisorInput) -> Tuple[float, float, float]:
    fpr_m = max_level_fpr(config, inp.n, inp.range_hint)
    fpr_p = estimate_point_fpr(config, inp.n)
    return fpr_m, fpr_p, math.hypot(fpr_m, inp.C * fpr_p)


def _basic(inp: AdvisorInput) -> AdvisorResult:
    cfg = basic_config(inp.d, inp.m, seed=inp.seed)
    cfg = choose_start_layer(cfg, inp.n, inp.saturation_cutoff)
    return AdvisorResult(cfg, *evaluate(cfg, inp), basic=True)


def candidates(inp: AdvisorInput, steps: int = 32) -> List[AdvisorResult]:
    """Best middle-segment split for every admissible exact level."""
    out = []
    top = min(int(math.floor(math.log2(EXACT_SHARE * inp.m))), inp.d - sum(MID_HEIGHTS) - 1)
    for exact_level in range(6, top + 1):
        m1 = 1 << exact_level
        words = (inp.m - m1) // 64
        if words < 2:
            continue
        heights, k, seg = template(inp.d, exact_level)
        layout = build_layout(inp.d, heights)
        best = None
        for s in range(1, steps):
            w2 = max(1, min(words - 1, round(words * s / steps)))
            cfg = FilterConfig(layout, k, seg, (m1, 64 * w2, 64 * (words - w2)), seed=inp.seed)
            cfg = choose_start_layer(cfg, inp.n, inp.saturation_cutoff)
            res = AdvisorResult(cfg, *evaluate(cfg, inp), basic=False)
            if best is None or res.fpr_w < best.fpr_w:
                best = res
        if best is not None:
            out.append(best)
    return out


def advise(inp: AdvisorInput) -> AdvisorResult:
    if inp.n <= 0 or inp.m < MIN_BITS_PER_KEY * inp.n:
        raise BudgetTooSmall(f"{inp.m} bits for {inp.n} keys; need at least {MIN_BITS_PER_KEY} bits/key")
    if inp.m < SEGMENTED_BITS_PER_KEY * inp.n:
        return _basic(inp)
    found = candidates(inp)
    if not found:
        return _basic(inp)
    return min(found, key=lambda r: r.fpr_w)


def config_to_text(config: FilterConfig) -> str:
    """Canonical ``key=value`` rendering, one field per line."""
    lay = config.layout
    seg = ",".join("-" if j is None else str(j) for j in config.segment_of)
    thr = "disabled" if config.early_stop_threshold is None else str(config.early_stop_threshold)
    lines = [
        f"d={lay.d}",
        f"heights={','.join(map(str, lay.heights))}",
        f"k={','.join(map(str, config.k))}",
        f"segment_of={seg}",
        f"segment_bits={','.join(map(str, config.segment_bits))}",
        f"early_stop_threshold={thr}",
        f"start_layer={config.start_layer}",
        f"seed={config.seed:#018x}",
    ]
    return "\n".join(lines) + "\n"


def config_from_text(text: str) -> FilterConfig:
    fields = {}
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, value = line.partition("=")
        fields[key.strip()] = value.strip()

    def ints(name):
        return tuple(int(x) for x in fields[name].split(","))

    d = int(fields["d"])
    layout = build_layout(d, ints("heights"))
    segment_of = tuple(None if x.strip() == "-" else int(x) for x in fields["segment_of"].split(","))
    thr = fields.get("early_stop_threshold", "3")
    return FilterConfig(
        layout, ints("k"), segment_of, ints("segment_bits"),
        early_stop_threshold=None if thr == "disabled" else int(thr),
        start_layer=int(fields.get("start_layer", "1")),
        seed=int(fields.get("seed", str(DEFAULT_SEED)), 0),
    )
