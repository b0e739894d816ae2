# ## Conjunctive predicates on two attributes
#
# Each row goes in twice, as <A,B> and <B,A>.  An equality on one attribute
# plus a range on the other becomes a single range probe.

import numpy as np

from bloomrf import Filter, basic_config
from bloomrf.encoders import AttributePair, Between, Eq, PairFilter, lt, plan_conjunctive

rng = np.random.default_rng(5)
a = rng.integers(0, 1000, size=2000, dtype=np.uint64)
b = rng.integers(0, 10_000, size=2000, dtype=np.uint64)

pf = PairFilter(Filter(basic_config(64, 32 * 4000)), AttributePair())
pf.insert_many(a, b)

print(plan_conjunctive(lt(42), Eq(4711)))
row = (int(a[0]), int(b[0]))
print(pf.query(Eq(row[0]), Eq(row[1])))
print(pf.query(Between(row[0] - 3, row[0] + 3), Eq(row[1])))
print(pf.query(Eq(5000), Between(0, 100)))  # A never exceeds 999
