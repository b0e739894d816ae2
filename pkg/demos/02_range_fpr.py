# ## Range false positives at a million keys
#
# Build the advisor's 22 bits/key filter and measure the false-positive rate
# of guaranteed-empty queries for a few range sizes.  Takes a few seconds.

import numpy as np

from bloomrf import ExactSet, Filter
from bloomrf.advisor import AdvisorInput, advise, config_to_text
from bloomrf.model import level_fpr
from bloomrf.workload import WorkloadSpec, generate_queries

n = 1_000_000
rng = np.random.default_rng(0)
keys = rng.integers(0, 2**64, size=n, dtype=np.uint64)

res = advise(AdvisorInput(n=n, m=22 * n))
print(config_to_text(res.config))

f = Filter(res.config)
f.insert_many(keys)
print("segment fill:", [round(x, 3) for x in f.occupancy().segment_fill])

oracle = ExactSet(keys)
for size in (1, 32, 1000, 100_000):
    lo, hi = generate_queries(WorkloadSpec(query_count=20_000, range_size=size, seed=size), oracle)
    fp = sum(f.range_lookup(a, b) for a, b in zip(lo.tolist(), hi.tolist()))
    level = 64 - int(np.ceil(np.log2(size)))
    print(f"range {size:>7}: measured {fp / lo.size:.4f}   model at level {level}: "
          f"{level_fpr(res.config, n, level):.4f}")
