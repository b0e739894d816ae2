# ## What the advisor picks
#
# Below 16 bits/key the advisor returns the basic layout; above it, an exact
# bitmap on top, a middle segment of short traces and a bottom segment of
# word-sized traces.

from bloomrf.advisor import AdvisorInput, advise, candidates
from bloomrf.errors import BudgetTooSmall

for n, bpk in [(1_000_000, 10), (1_000_000, 22), (50_000_000, 22)]:
    res = advise(AdvisorInput(n=n, m=bpk * n, range_hint=17))
    cfg = res.config
    kind = "basic" if res.basic else "segmented"
    print(f"n={n:>10} bits/key={bpk}: {kind} heights={cfg.layout.heights} "
          f"segments={cfg.segment_bits} start_layer={cfg.start_layer}")
    print(f"    point {res.fpr_p:.2e}  worst level {res.fpr_m:.2e}")

# ## The search space for one budget

inp = AdvisorInput(n=1_000_000, m=22_000_000, range_hint=17)
for c in candidates(inp):
    print(c.config.layout.heights[0], f"{c.fpr_w:.4g}", c.config.segment_bits)

try:
    advise(AdvisorInput(n=10, m=10))
except BudgetTooSmall as e:
    print("refused:", e)
