from .config import FilterConfig, basic_config, exact_config, layered_config
from .dyadic import DyadicInterval, LayerLayout, build_layout, covering_interval, dyadic_decompose, trace_bitmask
from .filter import Filter, create
from .hashing import BitPosition, HashFamily, exact_position, mh, positions_for
from .oracle import ExactSet
from .serialization import deserialize, serialize

__version__ = "0.1.0"
