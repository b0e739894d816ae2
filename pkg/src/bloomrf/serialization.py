"""Binary stream format for filters.

Layout (little-endian)::

    magic      4s   b"BRF1"
    version    u16
    d          u8
    L          u8
    heights    (L+1) x u8
    k          L x u8                 layers 1..L
    segment_of (L+1) x u8             0xFF = no exact layer
    nseg       u8
    seg_bits   nseg x u64
    seed       u64
    threshold  u8                     0xFF = early stop disabled
    start      u8
    key_count  u64
    payload    segments in order, whole 64-bit words, bit i at byte i>>3, bit i&7
    crc32      u32 over everything above
"""
from __future__ import annotations

import struct
import zlib

import numpy as np

from .config import FilterConfig
from .dyadic import build_layout
from .errors import BadMagic, ChecksumMismatch, TruncatedStream, VersionMismatch
from .filter import Filter
from .hashing import PRIME_TABLE_VERSION

MAGIC = b"BRF1"
FORMAT_VERSION = PRIME_TABLE_VERSION  # hash-table changes bump the stream version
_NONE = 0xFF


def header_bytes(config: FilterConfig, key_count: int = 0) -> bytes:
    lay = config.layout
    L = lay.L
    out = [MAGIC, struct.pack("<HBB", FORMAT_VERSION, lay.d, L)]
    out.append(bytes(lay.heights))
    out.append(bytes(config.k[1:]))
    out.append(bytes(_NONE if j is None else j for j in config.segment_of))
    out.append(struct.pack("<B", len(config.segment_bits)))
    out.append(struct.pack(f"<{len(config.segment_bits)}Q", *config.segment_bits))
    thr = _NONE if config.early_stop_threshold is None else config.early_stop_threshold
    out.append(struct.pack("<QBBQ", config.seed, thr, config.start_layer, key_count))
    return b"".join(out)


def serialize(f: Filter) -> bytes:
    # callers must quiesce writers first
    parts = [header_bytes(f.config, f.key_count)]
    parts.extend(v.astype("<u8", copy=False).tobytes() for v in f._views)
    body = b"".join(parts)
    return body + struct.pack("<I", zlib.crc32(body))


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise TruncatedStream(f"stream ends at {len(self.data)} bytes, needed {self.pos + n}")
        chunk = self.data[self.pos:self.pos + n]
        self.pos += n
        return chunk

    def unpack(self, fmt: str):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))


def deserialize(data: bytes) -> Filter:
    data = bytes(data)
    r = _Reader(data)
    if r.take(4) != MAGIC:
        raise BadMagic("not a bloomRF stream")
    version, d, L = r.unpack("<HBB")
    if version != FORMAT_VERSION:
        raise VersionMismatch(f"stream version {version}, supported {FORMAT_VERSION}")
    heights = tuple(r.take(L + 1))
    k = (0,) + tuple(r.take(L))
    segment_of = tuple(None if j == _NONE else j for j in r.take(L + 1))
    (nseg,) = r.unpack("<B")
    seg_bits = r.unpack(f"<{nseg}Q")
    seed, thr, start, key_count = r.unpack("<QBBQ")
    payload_len = sum(8 * ((m + 63) // 64) for m in seg_bits)
    body_end = r.pos + payload_len
    if body_end + 4 > len(data):
        raise TruncatedStream(f"stream has {len(data)} bytes, header announces {body_end + 4}")
    (crc,) = struct.unpack("<I", data[body_end:body_end + 4])
    if zlib.crc32(data[:body_end]) != crc:
        raise ChecksumMismatch("CRC-32 mismatch")

    config = FilterConfig(build_layout(d, heights), k, segment_of, seg_bits,
                          early_stop_threshold=None if thr == _NONE else thr,
                          start_layer=start, seed=seed)
    f = Filter(config)
    for view, m in zip(f._views, seg_bits):
        n = 8 * ((m + 63) // 64)
        view[:] = np.frombuffer(r.take(n), dtype="<u8")
    f.key_count = key_count
    return f


def save(f: Filter, path) -> None:
    with open(path, "wb") as fh:
        fh.write(serialize(f))


def load(path) -> Filter:
    with open(path, "rb") as fh:
        return deserialize(fh.read())
