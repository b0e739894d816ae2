"""Query workloads and the benchmark harness."""
from __future__ import annotations

import logging
import math
import statistics
import threading
import time
from dataclasses import asdict, dataclass, field
from typing import Optional, Tuple

import numpy as np

from .filter import Filter
from .model import estimate_point_fpr, max_level_fpr
from .oracle import ExactSet

log = logging.getLogger(__name__)

REPORT_SCHEMA = "bloomrf.bench/1"
DISTRIBUTIONS = ("uniform", "normal", "zipfian")


@dataclass(frozen=True)
class WorkloadSpec:
    distribution: str = "uniform"
    query_count: int = 100_000
    range_size: int = 1
    empty_only: bool = True
    seed: int = 0
    zipf_theta: float = 0.99
    zipf_buckets: int = 1000
    d: int = 64

    def __post_init__(self):
        if self.distribution not in DISTRIBUTIONS:
            raise ValueError(f"unknown distribution {self.distribution!r}")
        if self.range_size < 1:
            raise ValueError("range_size must be >= 1")
        if self.range_size > 1 << self.d:
            raise ValueError("range_size exceeds the domain")


class Zipfian:
    """Zipfian ranks over ``[0, items)``: P(rank r) proportional to ``(r + 1) ** -theta``.

    Same parametrisation as YCSB (theta 0.99 by default) but sampled exactly by
    inverting the CDF; YCSB's closed-form draw over-weights low ranks.
    """

    def __init__(self, items: int, theta: float = 0.99):
        if items < 2:
            raise ValueError("need at least two items")
        self.items = items
        self.theta = theta
        self._cdf = np.cumsum(self.pmf())
        self._cdf[-1] = 1.0

    def pmf(self) -> np.ndarray:
        w = np.arange(1, self.items + 1, dtype=np.float64) ** -self.theta
        return w / w.sum()

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return np.searchsorted(self._cdf, rng.random(size), side="right").astype(np.int64)


def lower_bounds(spec: WorkloadSpec, rng: np.random.Generator, size: int) -> np.ndarray:
    """Query start keys in ``[0, 2**d - range_size]``."""
    top = (1 << spec.d) - spec.range_size  # inclusive
    if spec.distribution == "uniform":
        return rng.integers(0, top, size=size, dtype=np.uint64, endpoint=True)
    if spec.distribution == "normal":
        dom = float(1 << spec.d)
        x = rng.normal(dom / 2, dom / 8, size=size)
        x = np.clip(x, 0.0, float(top))
        # float64 cannot hold 2**64 - 1; clamp after the cast too
        out = np.empty(size, dtype=np.uint64)
        big = x >= 2.0 ** 63
        out[~big] = x[~big].astype(np.uint64)
        out[big] = (x[big] - 2.0 ** 63).astype(np.uint64) + np.uint64(1 << 63)
        return np.minimum(out, np.uint64(top))
    z = Zipfian(spec.zipf_buckets, spec.zipf_theta)
    bucket = z.sample(rng, size).astype(np.uint64)
    width = (top + 1) // spec.zipf_buckets
    offset = rng.integers(0, max(width, 1), size=size, dtype=np.uint64)
    return np.minimum(bucket * np.uint64(width) + offset, np.uint64(top))


def generate_queries(spec: WorkloadSpec, oracle: Optional[ExactSet] = None,
                     max_rounds: int = 1000) -> Tuple[np.ndarray, np.ndarray]:
    """``(lo, hi)`` arrays of closed query ranges.

    With ``empty_only`` every candidate intersecting the oracle's key set is
    rejected and redrawn.
    """
    if spec.empty_only and oracle is None:
        raise ValueError("empty_only workloads need an oracle")
    rng = np.random.default_rng(spec.seed)
    span = np.uint64(spec.range_size - 1)
    los, his = [], []
    need = spec.query_count
    for _ in range(max_rounds):
        if need <= 0:
            break
        lo = lower_bounds(spec, rng, max(need, 1024))
        hi = lo + span
        if spec.empty_only:
            keep = ~oracle.range_many(lo, hi)
            lo, hi = lo[keep], hi[keep]
        lo, hi = lo[:need], hi[:need]
        los.append(lo)
        his.append(hi)
        need -= lo.size
    if need > 0:
        raise RuntimeError(f"could not draw {spec.query_count} empty queries; key set too dense")
    return np.concatenate(los), np.concatenate(his)


@dataclass
class BenchReport:
    config: dict
    workload: dict
    queries: int
    false_positives: int
    true_negatives: int
    true_positives: int
    fpr: float
    latency_mean_us: float
    latency_median_us: float
    latency_p99_us: float
    insert_keys_per_s: float
    segment_fill: list
    model_point_fpr: float
    model_level_fpr: float
    threads: dict = field(default_factory=dict)
    schema: str = REPORT_SCHEMA

    def to_dict(self) -> dict:
        return asdict(self)

    def csv_header(self) -> str:
        return ",".join(self._flat().keys())

    def csv_row(self) -> str:
        return ",".join(str(v) for v in self._flat().values())

    def _flat(self) -> dict:
        flat = {}
        for k, v in self.to_dict().items():
            if isinstance(v, dict):
                for k2, v2 in v.items():
                    flat[f"{k}.{k2}"] = v2 if not isinstance(v2, (list, tuple)) else "|".join(map(str, v2))
            elif isinstance(v, list):
                flat[k] = "|".join(f"{x:.6g}" for x in v)
            else:
                flat[k] = v
        return flat


def _timed_queries(f: Filter, lo: np.ndarray, hi: np.ndarray, point: bool):
    lat = np.empty(lo.size, dtype=np.float64)
    ans = np.empty(lo.size, dtype=bool)
    clock = time.perf_counter_ns
    for i, (a, b) in enumerate(zip(lo.tolist(), hi.tolist())):
        t0 = clock()
        ans[i] = f.point_lookup(a) if point else f.range_lookup(a, b)
        lat[i] = clock() - t0
    return ans, lat


def run_bench(f: Filter, spec: WorkloadSpec, keys: np.ndarray, threads: Tuple[int, int] = (0, 1),
              warmup: int = 1000) -> BenchReport:
    """Measure FPR and per-probe latency of ``f`` against the exact key set."""
    oracle = ExactSet(keys)
    lo, hi = generate_queries(spec, oracle)
    truth = oracle.range_many(lo, hi)
    point = spec.range_size == 1

    # warm-up pass, not reported
    _timed_queries(f, lo[:warmup], hi[:warmup], point)

    writers, readers = threads
    thread_info = {}
    if writers == 0 and readers <= 1:
        ans, lat = _timed_queries(f, lo, hi, point)
    else:
        ans, lat, thread_info = _threaded(f, lo, hi, point, keys, writers, max(readers, 1))

    fp = int(np.sum(ans & ~truth))
    tn = int(np.sum(~ans & ~truth))
    tp = int(np.sum(truth))
    if np.any(truth & ~ans):
        raise AssertionError("filter returned a false negative")

    fresh = Filter(f.config)
    t0 = time.perf_counter()
    fresh.insert_many(keys)
    dt = time.perf_counter() - t0
    n = int(np.unique(keys).size)
    hint = max(0, math.ceil(math.log2(spec.range_size)))
    lat_us = lat / 1e3
    cfg = f.config
    return BenchReport(
        config={"d": cfg.d, "heights": list(cfg.layout.heights), "k": list(cfg.k),
                "segment_of": [-1 if j is None else j for j in cfg.segment_of],
                "segment_bits": list(cfg.segment_bits), "start_layer": cfg.start_layer,
                "early_stop_threshold": cfg.early_stop_threshold, "seed": cfg.seed,
                "bits_per_key": cfg.total_bits / max(n, 1)},
        workload={**asdict(spec)},
        queries=int(lo.size),
        false_positives=fp,
        true_negatives=tn,
        true_positives=tp,
        fpr=fp / (fp + tn) if fp + tn else 0.0,
        latency_mean_us=float(lat_us.mean()),
        latency_median_us=float(statistics.median(lat_us.tolist())),
        latency_p99_us=float(np.percentile(lat_us, 99)),
        insert_keys_per_s=keys.size / dt if dt > 0 else float("inf"),
        segment_fill=f.occupancy().segment_fill,
        model_point_fpr=estimate_point_fpr(cfg, n),
        model_level_fpr=max_level_fpr(cfg, n, hint),
        threads=thread_info,
    )


def _threaded(f, lo, hi, point, keys, writers, readers):
    """Readers split the queries; writers re-insert ``keys`` until readers finish."""
    ans = np.empty(lo.size, dtype=bool)
    lat = np.empty(lo.size, dtype=np.float64)
    done = threading.Event()
    inserted = [0] * writers
    chunks = np.array_split(np.arange(lo.size), readers)

    def read(idx):
        a, l_ = _timed_queries(f, lo[idx], hi[idx], point)
        ans[idx] = a
        lat[idx] = l_

    def write(w):
        part = keys[w::writers].tolist()
        i = 0
        while not done.is_set() and part:
            f.insert(part[i % len(part)])
            i += 1
        inserted[w] = i

    ws = [threading.Thread(target=write, args=(w,)) for w in range(writers)]
    rs = [threading.Thread(target=read, args=(c,)) for c in chunks]
    t0 = time.perf_counter()
    for t in ws + rs:
        t.start()
    for t in rs:
        t.join()
    elapsed = time.perf_counter() - t0
    done.set()
    for t in ws:
        t.join()
    info = {"writers": writers, "readers": readers, "elapsed_s": elapsed,
            "lookups_per_s": lo.size / elapsed, "inserts_per_s": sum(inserted) / elapsed}
    log.info("threaded bench: %s", info)
    return ans, lat, info
