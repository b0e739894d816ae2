"""Filter configuration: layout, hash counts and segment assignment."""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

from .dyadic import LayerLayout, build_layout
from .errors import InvalidConfig

DEFAULT_SEED = 0x5EED_B100_3F00_0001
DEFAULT_EARLY_STOP = 3
MAX_TRACE_HEIGHT = 7  # 2**(7-1) = 64-bit traces, one machine word
MAX_REPLICAS = 16
MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class FilterConfig:
    """Complete description of one filter instance.

    ``k`` and ``segment_of`` are indexed by layer (length ``L + 1``).  For the
    exact layer ``k[0]`` is 0; without an exact layer ``segment_of[0]`` is
    ``None``.  ``early_stop_threshold=None`` disables the range-lookup early
    stop.
    """

    layout: LayerLayout
    k: Tuple[int, ...]
    segment_of: Tuple[Optional[int], ...]
    segment_bits: Tuple[int, ...]
    early_stop_threshold: Optional[int] = DEFAULT_EARLY_STOP
    start_layer: int = 1
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        object.__setattr__(self, "k", tuple(int(x) for x in self.k))
        object.__setattr__(self, "segment_of",
                           tuple(None if j is None else int(j) for j in self.segment_of))
        object.__setattr__(self, "segment_bits", tuple(int(m) for m in self.segment_bits))
        self._validate()

    @property
    def d(self) -> int:
        return self.layout.d

    @property
    def L(self) -> int:
        return self.layout.L

    @property
    def exact_layer(self) -> bool:
        return self.layout.has_exact

    @property
    def total_bits(self) -> int:
        return sum(self.segment_bits)

    @property
    def probed_layers(self) -> range:
        return range(self.start_layer, self.L + 1)

    def replace(self, **changes) -> "FilterConfig":
        return dataclasses.replace(self, **changes)

    def _validate(self):
        lay = self.layout
        L = lay.L
        if len(self.k) != L + 1 or len(self.segment_of) != L + 1:
            raise InvalidConfig(f"k and segment_of need {L + 1} entries")
        if not self.segment_bits:
            raise InvalidConfig("at least one segment is required")
        if len(self.segment_bits) > 255:
            raise InvalidConfig("at most 255 segments")
        if not 0 <= self.seed <= MASK64:
            raise InvalidConfig("seed must be a 64-bit unsigned value")
        t = self.early_stop_threshold
        if t is not None and not 0 <= t < 255:
            raise InvalidConfig(f"early-stop threshold {t} outside [0, 254]")
        if not 1 <= self.start_layer <= max(L, 1):
            raise InvalidConfig(f"start_layer {self.start_layer} outside [1, {max(L, 1)}]")

        nseg = len(self.segment_bits)
        used = set()
        exact_seg = None
        if lay.has_exact:
            exact_seg = self.segment_of[0]
            if exact_seg is None or not 0 <= exact_seg < nseg:
                raise InvalidConfig("exact layer needs a valid segment")
            if self.k[0] != 0:
                raise InvalidConfig("the exact layer takes no hash functions")
            want = 1 << lay.bottom_levels[0]
            if self.segment_bits[exact_seg] != want:
                raise InvalidConfig(f"exact segment must hold exactly 2**{lay.bottom_levels[0]} bits")
            used.add(exact_seg)
        elif self.segment_of[0] is not None:
            raise InvalidConfig("segment_of[0] must be None without an exact layer")

        for i in range(1, L + 1):
            h = lay.heights[i]
            if h > MAX_TRACE_HEIGHT:
                raise InvalidConfig(f"layer {i}: height {h} exceeds {MAX_TRACE_HEIGHT} (64-bit traces)")
            if not 1 <= self.k[i] <= MAX_REPLICAS:
                raise InvalidConfig(f"layer {i}: k={self.k[i]} outside [1, {MAX_REPLICAS}]")
            j = self.segment_of[i]
            if j is None or not 0 <= j < nseg:
                raise InvalidConfig(f"layer {i}: invalid segment {j}")
            if j == exact_seg:
                raise InvalidConfig(f"layer {i} shares the exact segment")
            m = self.segment_bits[j]
            # storage rounds up to whole 64-bit words; traces never straddle a word
            if m <= 0 or m % (1 << lay.trace_bits[i]):
                raise InvalidConfig(f"segment {j}: {m} bits is not aligned to layer {i}'s "
                                    f"{1 << lay.trace_bits[i]}-bit traces")
            used.add(j)
        if used != set(range(nseg)):
            raise InvalidConfig(f"unused segments: {sorted(set(range(nseg)) - used)}")


def basic_config(d: int, m: int, height: Optional[int] = None, *, seed: int = DEFAULT_SEED,
                 early_stop_threshold: Optional[int] = DEFAULT_EARLY_STOP,
                 start_layer: int = 1) -> FilterConfig:
    """Basic bloomRF: uniform trace height, one shared segment, one PMHF per layer.

    ``m`` is rounded down to a multiple of 64.  When ``height`` does not
    divide ``d`` the remainder becomes the height of layer 1.
    """
    if height is None:
        height = 4 if d <= 8 else MAX_TRACE_HEIGHT
    m = (m // 64) * 64
    if m <= 0:
        raise InvalidConfig("basic config needs at least 64 bits")
    heights = uniform_heights(d, height)
    L = len(heights) - 1
    return FilterConfig(build_layout(d, heights), (0,) + (1,) * L, (None,) + (0,) * L, (m,),
                        early_stop_threshold=early_stop_threshold, start_layer=start_layer, seed=seed)


def uniform_heights(d: int, height: int) -> Tuple[int, ...]:
    rem = d % height
    return (0,) + ((rem,) if rem else ()) + (height,) * (d // height)


def exact_config(d: int, *, seed: int = DEFAULT_SEED) -> FilterConfig:
    """Single exact layer over the whole domain: an uncompressed bitmap."""
    return FilterConfig(build_layout(d, (d,)), (0,), (0,), (1 << d,), seed=seed)


def layered_config(d: int, heights: Sequence[int], segment_bits: Sequence[int],
                   k: Optional[Sequence[int]] = None, segment_of: Optional[Sequence[Optional[int]]] = None,
                   **kw) -> FilterConfig:
    """Convenience constructor; defaults to k=1 and a single shared hashed segment."""
    lay = build_layout(d, heights)
    L = lay.L
    if k is None:
        k = (0,) + (1,) * L
    if segment_of is None:
        if lay.has_exact:
            segment_of = (0,) + (1,) * L
        else:
            segment_of = (None,) + (0,) * L
    return FilterConfig(lay, tuple(k), tuple(segment_of), tuple(segment_bits), **kw)
