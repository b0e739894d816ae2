"""Exception types raised across the package."""


class BloomRFError(ValueError):
    pass


# layout / dyadic arithmetic
class SumMismatch(BloomRFError):
    pass


class ZeroHeight(BloomRFError):
    pass


class LevelOutOfRange(BloomRFError):
    pass


class NoIntersection(BloomRFError):
    pass


# hashing
class LayerOutOfRange(BloomRFError):
    pass


class ReplicaOutOfRange(BloomRFError):
    pass


class NoExactLayer(BloomRFError):
    pass


# filter
class InvalidConfig(BloomRFError):
    pass


class InvalidRange(BloomRFError):
    pass


# serialization
class BadMagic(BloomRFError):
    pass


class VersionMismatch(BloomRFError):
    pass


class ChecksumMismatch(BloomRFError):
    pass


class TruncatedStream(BloomRFError):
    pass


# advisor / encoders
class BudgetTooSmall(BloomRFError):
    pass


class TwoRanges(BloomRFError):
    pass
