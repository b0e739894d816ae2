# ## A first filter
#
# Insert a handful of keys into a tiny 8-bit domain and ask point and range
# questions.  Two layers of height 4, one shared 32-bit array.

import bloomrf as brf

cfg = brf.layered_config(8, (0, 4, 4), (32,), seed=1)
f = brf.Filter(cfg)
for key in (129, 131, 160, 211):
    f.insert(key)
print(f)

# Point lookups never miss an inserted key.
print([k in f for k in (129, 131, 160, 211)])
print(f.point_lookup(130), f.point_lookup(7))

# ## Range lookups and what they touch

trace = []
print("[190, 204] ->", f.range_lookup(190, 204, trace=trace))
for layer, tt_lo, tt_hi in trace:
    print(f"  fetched layer {layer} trace over [{tt_lo}, {tt_hi}]")

print("[150, 170] ->", f.range_lookup(150, 170))

# ## Masks, drawn left to right

lay = cfg.layout
print(f"{brf.trace_bitmask(lay, 1, 190, 190, 204):08b}")
print(f"{brf.trace_bitmask(lay, 2, 184, 190, 191):08b}")

# ## Dyadic pieces of a range

for iv in brf.dyadic_decompose(190, 204, 8):
    print(iv)
