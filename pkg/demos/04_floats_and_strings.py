# ## Floats and strings as keys
#
# Codes preserve order, so range queries over floats or string prefixes map
# onto ordinary key ranges.

import numpy as np

from bloomrf import Filter, basic_config
from bloomrf.encoders import decode_float, encode_string, float_bits, float_key, string_prefix_range

prices = [0.99, 1.5, 2.25, 19.99, 250.0, -3.0]
f = Filter(basic_config(64, 4096))
for p in prices:
    f.insert(float_key(p))

print(f.range_lookup(float_key(1.0), float_key(3.0)))     # holds 1.5 and 2.25
print(f.range_lookup(float_key(251.0), float_key(260.0)))  # empty
print(f.range_lookup(float_key(3.0), float_key(19.0)))     # empty
# a very wide range sharing coarse prefixes with 250.0 can come back positive
print(f.range_lookup(float_key(300.0), float_key(1e9)))
print(f.range_lookup(float_key(-5.0), float_key(-1.0)))

print(hex(float_bits(-0.0)), float_key(-0.0) < float_key(0.0))
print(decode_float(float_key(2.25)) == float_bits(2.25))

# ## Strings

words = ["apple", "apricot", "banana", "blueberry", "cherry"]
g = Filter(basic_config(64, 4096))
for w in words:
    g.insert(encode_string(w))
print(g.range_lookup(*string_prefix_range("ap", "ap\xff")))
print(g.range_lookup(*string_prefix_range("c", "ch")))
print(g.range_lookup(*string_prefix_range("x", "z")))

codes = np.array([encode_string(w) for w in sorted(words)], dtype=np.uint64)
print("sorted strings give sorted codes:", bool(np.all(np.diff(codes.astype(object)) > 0)))
