"""Counter-based random streams.

Every stream is identified by ``(seed, index)``.  The n-th draw of a stream is
``mix64(key + n * GAMMA)`` where ``key`` is derived from the pair, which is the
SplitMix64 construction with an O(1) jump to any position.  Walk ``i`` of a
batch always reads stream ``offset + i``, so results never depend on how walks
are scheduled across threads.
"""
from __future__ import annotations

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB

DEFAULT_SEED = 20_240_607


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def seed_key(seed: int) -> int:
    """Scramble a user seed into the 64-bit base used for stream keys."""
    return mix64((seed & MASK64) ^ 0x6A09E667F3BCC909)


def stream_key(seed: int, index: int) -> int:
    return mix64(seed_key(seed) + ((index + 1) * GAMMA))


class RngStream:
    """Deterministic stream of 64-bit draws.

    Two streams built from the same ``(seed, index)`` produce identical
    sequences; the numba walk kernels reproduce exactly the same draws.
    """

    __slots__ = ("seed", "index", "key", "counter")

    def __init__(self, seed: int, index: int = 0):
        if index < 0:
            raise ValueError("stream index must be non-negative")
        self.seed = int(seed)
        self.index = int(index)
        self.key = stream_key(self.seed, self.index)
        self.counter = 0

    def next_u64(self) -> int:
        self.counter += 1
        return mix64(self.key + self.counter * GAMMA)

    def random(self) -> float:
        """Uniform float in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def integers(self, n: int) -> int:
        """Uniform integer in ``range(n)`` (multiply-shift, bias below 2**-40)."""
        return (self.next_u64() * n) >> 64

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, index={self.index}, counter={self.counter})"
