"""Order-compatible key encodings for floats, strings and attribute pairs."""
from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np

from .errors import TwoRanges


# -- floating point ---------------------------------------------------------

@dataclass(frozen=True)
class FloatLayout:
    q: int  # mantissa bits
    r: int  # exponent bits

    def __post_init__(self):
        if self.width not in (16, 32, 64):
            raise ValueError(f"unsupported float width {self.width}")

    @property
    def width(self) -> int:
        return self.q + self.r + 1

    @property
    def sign_bit(self) -> int:
        return 1 << (self.q + self.r)


HALF = FloatLayout(10, 5)
SINGLE = FloatLayout(23, 8)
DOUBLE = FloatLayout(52, 11)

_STRUCT = {16: ("<e", "<H"), 32: ("<f", "<I"), 64: ("<d", "<Q")}


def encode_float(bits: int, layout: FloatLayout = DOUBLE) -> int:
    """Monotone code of a float bit pattern.

    Non-negative patterns are shifted above the sign bit, negative ones are
    bit-inverted, so codes compare like the floats they encode.  -0.0 sorts
    directly below +0.0.  NaN patterns land outside the numeric band.
    """
    full = (1 << layout.width) - 1
    if bits & layout.sign_bit:
        return ~bits & full
    return bits + layout.sign_bit


def decode_float(code: int, layout: FloatLayout = DOUBLE) -> int:
    full = (1 << layout.width) - 1
    if code & layout.sign_bit:
        return code - layout.sign_bit
    return ~code & full


def float_bits(x: float, layout: FloatLayout = DOUBLE) -> int:
    ffmt, ifmt = _STRUCT[layout.width]
    return struct.unpack(ifmt, struct.pack(ffmt, x))[0]


def float_key(x: float, layout: FloatLayout = DOUBLE) -> int:
    return encode_float(float_bits(x, layout), layout)


def encode_float_many(bits, layout: FloatLayout = DOUBLE) -> np.ndarray:
    dt = {16: np.uint16, 32: np.uint32, 64: np.uint64}[layout.width]
    bits = np.asarray(bits).astype(dt)
    neg = (bits & dt(layout.sign_bit)) != 0
    return np.where(neg, ~bits, bits + dt(layout.sign_bit)).astype(dt)


# -- strings ----------------------------------------------------------------

PREFIX_BYTES = 7
FNV_OFFSET = 0x811C9DC5
FNV_PRIME = 0x01000193


def suffix_hash(suffix: bytes, length: int) -> int:
    """One-byte digest of the bytes past the prefix and the total length.

    FNV-1a (32-bit) over ``suffix`` followed by ``length`` as 8 little-endian
    bytes, xor-folded to 8 bits.  Changing it breaks stored filters.
    """
    h = FNV_OFFSET
    for byte in suffix + length.to_bytes(8, "little"):
        h = ((h ^ byte) * FNV_PRIME) & 0xFFFFFFFF
    return (h ^ (h >> 8) ^ (h >> 16) ^ (h >> 24)) & 0xFF


def encode_string(s: Union[bytes, str]) -> int:
    """64-bit code: first 7 bytes big-endian in the top, suffix digest in the low byte.

    Only the 7-byte prefix is order-preserving.
    """
    if isinstance(s, str):
        s = s.encode("utf-8")
    prefix = s[:PREFIX_BYTES].ljust(PREFIX_BYTES, b"\0")
    return (int.from_bytes(prefix, "big") << 8) | suffix_hash(s[PREFIX_BYTES:], len(s))


def string_prefix_range(lo: Union[bytes, str], hi: Union[bytes, str]) -> Tuple[int, int]:
    """Key range covering every string between ``lo`` and ``hi`` (prefix order)."""
    if isinstance(lo, str):
        lo = lo.encode("utf-8")
    if isinstance(hi, str):
        hi = hi.encode("utf-8")
    a = int.from_bytes(lo[:PREFIX_BYTES].ljust(PREFIX_BYTES, b"\0"), "big") << 8
    b = (int.from_bytes(hi[:PREFIX_BYTES].ljust(PREFIX_BYTES, b"\0"), "big") << 8) | 0xFF
    return a, b


# -- two attributes ---------------------------------------------------------

@dataclass(frozen=True)
class AttributePair:
    """Precision of the two attributes inside one combined key.

    ``a_width``/``b_width`` are the source widths; values are reduced to
    their top ``a_bits``/``b_bits`` bits.
    """

    a_bits: int = 32
    b_bits: int = 32
    a_width: int = 32
    b_width: int = 32

    def __post_init__(self):
        if not (0 < self.a_bits <= self.a_width and 0 < self.b_bits <= self.b_width):
            raise ValueError("kept bits must be positive and fit the source width")

    @property
    def d(self) -> int:
        return self.a_bits + self.b_bits

    def reduce_a(self, v: int) -> int:
        return v >> (self.a_width - self.a_bits)

    def reduce_b(self, v: int) -> int:
        return v >> (self.b_width - self.b_bits)


def encode_pair(a: int, b: int, pair: AttributePair = AttributePair()) -> Tuple[int, int]:
    """Keys ``<A,B>`` and ``<B,A>``; insert both."""
    ta, tb = pair.reduce_a(a), pair.reduce_b(b)
    return (ta << pair.b_bits) | tb, (tb << pair.a_bits) | ta


@dataclass(frozen=True)
class Eq:
    value: int


@dataclass(frozen=True)
class Between:
    """Closed range; ``hi=None`` means the attribute maximum."""

    lo: int = 0
    hi: Optional[int] = None


def lt(v: int) -> Between:
    if v <= 0:
        raise ValueError("x < 0 is empty for unsigned attributes")
    return Between(0, v - 1)


def le(v: int) -> Between:
    return Between(0, v)


def gt(v: int) -> Between:
    return Between(v + 1, None)


def ge(v: int) -> Between:
    return Between(v, None)


@dataclass(frozen=True)
class ProbePlan:
    combination: str  # "AB" or "BA"
    lo: int
    hi: int

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi


def _reduced_span(pred: Between, width: int, reduce) -> Tuple[int, int]:
    hi = (1 << width) - 1 if pred.hi is None else min(pred.hi, (1 << width) - 1)
    if pred.lo > hi:
        raise ValueError(f"empty range predicate {pred}")
    # truncation is monotone, so reduced endpoints bound every reduced member
    return reduce(pred.lo), reduce(hi)


def plan_conjunctive(pred_a, pred_b, pair: AttributePair = AttributePair()) -> ProbePlan:
    """Translate ``pred_a AND pred_b`` into one point or range probe."""
    a_range = isinstance(pred_a, Between)
    b_range = isinstance(pred_b, Between)
    if a_range and b_range:
        raise TwoRanges("at most one attribute may carry a range predicate")
    if not a_range and not b_range:
        key = (pair.reduce_a(pred_a.value) << pair.b_bits) | pair.reduce_b(pred_b.value)
        return ProbePlan("AB", key, key)
    if a_range:
        base = pair.reduce_b(pred_b.value) << pair.a_bits
        lo, hi = _reduced_span(pred_a, pair.a_width, pair.reduce_a)
        return ProbePlan("BA", base + lo, base + hi)
    base = pair.reduce_a(pred_a.value) << pair.b_bits
    lo, hi = _reduced_span(pred_b, pair.b_width, pair.reduce_b)
    return ProbePlan("AB", base + lo, base + hi)


class PairFilter:
    """Two-attribute filter: every row is inserted as ``<A,B>`` and ``<B,A>``."""

    def __init__(self, flt, pair: AttributePair = AttributePair()):
        if flt.config.d != pair.d:
            raise ValueError(f"filter domain {flt.config.d} != combined width {pair.d}")
        self.filter = flt
        self.pair = pair

    def insert(self, a: int, b: int) -> None:
        ab, ba = encode_pair(a, b, self.pair)
        self.filter.insert(ab)
        self.filter.insert(ba)

    def insert_many(self, a, b) -> None:
        p = self.pair
        ta = np.asarray(a, dtype=np.uint64) >> np.uint64(p.a_width - p.a_bits)
        tb = np.asarray(b, dtype=np.uint64) >> np.uint64(p.b_width - p.b_bits)
        self.filter.insert_many((ta << np.uint64(p.b_bits)) | tb)
        self.filter.insert_many((tb << np.uint64(p.a_bits)) | ta)

    def query(self, pred_a, pred_b) -> bool:
        plan = plan_conjunctive(pred_a, pred_b, self.pair)
        if plan.is_point:
            return self.filter.point_lookup(plan.lo)
        return self.filter.range_lookup(plan.lo, plan.hi)
