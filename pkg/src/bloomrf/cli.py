"""``bloomrf`` command line: build, bench and advise."""
from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from typing import List, Optional

import numpy as np

from .advisor import AdvisorInput, advise, config_from_text, config_to_text
from .errors import BloomRFError, BudgetTooSmall
from .filter import Filter
from .model import level_fpr
from .serialization import header_bytes, load, save
from .workload import DISTRIBUTIONS, WorkloadSpec, run_bench

log = logging.getLogger("bloomrf")

LOG_ENV = "BLOOMRF_LOG_LEVEL"
# named range hints, as log2 of the largest expected query range
RANGE_HINTS = {"point": 0, "small": 5, "medium": 10, "large": 17}


class KeyFileError(ValueError):
    pass


def read_keys(path: str, fmt: str = "text") -> np.ndarray:
    """Keys from a text file (decimal or 0x-hex, one per line) or raw little-endian u64 records."""
    if fmt == "binary":
        with open(path, "rb") as fh:
            data = fh.read()
        if len(data) % 8:
            raise KeyFileError(f"{path}: {len(data)} bytes is not a whole number of 8-byte records")
        return np.frombuffer(data, dtype="<u8").astype(np.uint64)
    keys = []
    with open(path, "r", encoding="ascii", errors="replace") as fh:
        for lineno, line in enumerate(fh, 1):
            s = line.strip()
            if not s or s.startswith("#"):
                continue
            try:
                v = int(s, 0)
            except ValueError:
                raise KeyFileError(f"{path}:{lineno}: cannot parse key {s!r}") from None
            if not 0 <= v < 1 << 64:
                raise KeyFileError(f"{path}:{lineno}: key {s} outside 64-bit unsigned range")
            keys.append(v)
    return np.array(keys, dtype=np.uint64)


def parse_range_hint(text: Optional[str]) -> Optional[int]:
    """Named hint, or the largest expected range size as an integer."""
    if text is None:
        return None
    if text in RANGE_HINTS:
        return RANGE_HINTS[text]
    size = int(text, 0)
    if size < 1:
        raise argparse.ArgumentTypeError("range hint must be >= 1")
    return max(0, math.ceil(math.log2(size)))


def parse_threads(text: str):
    w, _, r = text.partition(":")
    try:
        w, r = int(w), int(r or 1)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected W:R, got {text!r}") from None
    if w < 0 or r < 1:
        raise argparse.ArgumentTypeError("need W >= 0 writers and R >= 1 readers")
    return w, r


def _summary(f: Filter) -> str:
    occ = f.occupancy()
    n = max(f.key_count, 1)
    fills = ", ".join(f"{x:.3f}" for x in occ.segment_fill)
    return (f"keys={f.key_count} bits={f.config.total_bits} bits/key={f.config.total_bits / n:.2f} "
            f"set_bits={f.popcount()} segment_fill=[{fills}]")


def cmd_build(args) -> int:
    keys = read_keys(args.keys, args.format)
    if args.config:
        with open(args.config) as fh:
            config = config_from_text(fh.read())
    else:
        n = max(int(np.unique(keys).size), 1)
        # one storage word minimum so tiny and empty key files still build
        res = advise(AdvisorInput(n=n, m=max(64, int(args.bits_per_key * n)),
                                  range_hint=parse_range_hint(args.range_hint), d=args.domain_bits))
        config = res.config
    f = Filter(config)
    f.insert_many(keys)
    save(f, args.out)
    print(_summary(f))
    return 0


def cmd_bench(args) -> int:
    f = load(args.filter)
    keys = read_keys(args.keys, args.format)
    spec = WorkloadSpec(distribution=args.dist, query_count=args.queries, range_size=args.range_size,
                        empty_only=args.empty_only, seed=args.seed, zipf_theta=args.zipf_theta,
                        d=f.config.d)
    report = run_bench(f, spec, keys, threads=args.threads)
    doc = json.dumps(report.to_dict(), indent=2)
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(doc + "\n")
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(report.csv_header() + "\n" + report.csv_row() + "\n")
    print(f"fpr={report.fpr:.6f} model_point={report.model_point_fpr:.6f} "
          f"model_level={report.model_level_fpr:.6f} mean_us={report.latency_mean_us:.2f} "
          f"p99_us={report.latency_p99_us:.2f} queries={report.queries}")
    return 0


def cmd_advise(args) -> int:
    n = args.keys_count
    inp = AdvisorInput(n=n, m=int(args.bits_per_key * n), range_hint=parse_range_hint(args.range_hint),
                       d=args.domain_bits)
    try:
        res = advise(inp)
    except BudgetTooSmall as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    cfg = res.config
    print("# " + ("basic" if res.basic else f"{len(cfg.segment_bits)}-segment") + " configuration")
    print(config_to_text(cfg), end="")
    print(f"# predicted point_fpr={res.fpr_p:.6g} max_level_fpr={res.fpr_m:.6g} weighted={res.fpr_w:.6g}")
    print("# level  range_size  predicted_fpr")
    for level in range(cfg.d, -1, -max(1, cfg.d // 16)):
        print(f"# {level:5d}  2^{cfg.d - level:<8d}  {level_fpr(cfg, n, level):.6g}")
    print("header=" + header_bytes(cfg).hex())
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bloomrf", description="bloomRF point/range filter tools")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="build a filter from a key file")
    b.add_argument("--keys", required=True)
    b.add_argument("--format", choices=("text", "binary"), default="text")
    g = b.add_mutually_exclusive_group(required=True)
    g.add_argument("--config", help="key=value configuration file")
    g.add_argument("--bits-per-key", type=float)
    b.add_argument("--range-hint", help="largest expected range size, or point/small/medium/large")
    b.add_argument("--domain-bits", type=int, default=64)
    b.add_argument("--out", required=True)
    b.set_defaults(func=cmd_build)

    q = sub.add_parser("bench", help="measure FPR and latency")
    q.add_argument("--filter", required=True)
    q.add_argument("--keys", required=True)
    q.add_argument("--format", choices=("text", "binary"), default="text")
    q.add_argument("--dist", choices=DISTRIBUTIONS, default="uniform")
    q.add_argument("--range-size", type=int, default=1)
    q.add_argument("--queries", type=int, default=100_000)
    q.add_argument("--empty-only", action="store_true")
    q.add_argument("--threads", type=parse_threads, default=(0, 1), help="writers:readers")
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--zipf-theta", type=float, default=0.99)
    q.add_argument("--report", help="JSON report path")
    q.add_argument("--csv", help="CSV report path")
    q.set_defaults(func=cmd_bench)

    a = sub.add_parser("advise", help="suggest a configuration")
    a.add_argument("--keys-count", type=int, required=True)
    a.add_argument("--bits-per-key", type=float, required=True)
    a.add_argument("--range-hint")
    a.add_argument("--domain-bits", type=int, default=64)
    a.set_defaults(func=cmd_advise)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    logging.basicConfig(level=os.environ.get(LOG_ENV, "WARNING").upper(),
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (BloomRFError, KeyFileError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
