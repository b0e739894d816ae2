# ## Point queries against a plain Bloom filter
#
# Same bits per key.  The plain filter answers points only; bloomRF pays a
# little point FPR for answering ranges too.

import numpy as np

from bloomrf import Filter
from bloomrf.advisor import AdvisorInput, advise
from bloomrf.baseline import BloomFilter

n = 200_000
rng = np.random.default_rng(9)
keys = rng.integers(0, 2**64, size=n, dtype=np.uint64)
probes = rng.integers(0, 2**64, size=200_000, dtype=np.uint64)

for bpk in (10, 16, 22):
    bf = BloomFilter.for_budget(n, bpk)
    bf.insert_many(keys)
    res = advise(AdvisorInput(n=n, m=bpk * n))
    rf = Filter(res.config)
    rf.insert_many(keys)
    print(f"{bpk:>2} bits/key  bloom {bf.contains_many(probes).mean():.5f} "
          f"(expected {bf.expected_fpr(n):.5f})   bloomRF {rf.point_lookup_many(probes).mean():.5f} "
          f"(model {res.fpr_p:.5f})")
