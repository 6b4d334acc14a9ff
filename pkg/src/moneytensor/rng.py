"""Fixed 64-bit PRNG so simulations are bit-reproducible everywhere.

xoshiro256** with its state expanded from the seed by SplitMix64, as
published by Blackman & Vigna. Uniform doubles take the top 53 bits;
normals use the Marsaglia polar method (rejection), each draw starting
fresh so the generator state is a pure function of the draw count.
"""

from __future__ import annotations

import math

_MASK = (1 << 64) - 1


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & _MASK


def _splitmix64_stream(seed: int):
    state = seed & _MASK
    while True:
        state = (state + 0x9E3779B97F4A7C15) & _MASK
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        yield z ^ (z >> 31)


class Xoshiro256StarStar:
    """Deterministic generator; state is an exposable 4-tuple of uint64."""

    def __init__(self, seed: int = 0):
        stream = _splitmix64_stream(seed)
        self._s = [next(stream) for _ in range(4)]
        # All-zero state is a fixed point; SplitMix64 cannot emit four
        # zeros in a row, so this only guards hand-built states.
        if not any(self._s):
            self._s[0] = 1

    @classmethod
    def from_state(cls, state: tuple) -> "Xoshiro256StarStar":
        rng = cls.__new__(cls)
        s = [int(v) & _MASK for v in state]
        if len(s) != 4 or not any(s):
            raise ValueError("state must be four uint64 words, not all zero")
        rng._s = s
        return rng

    def getstate(self) -> tuple:
        return tuple(self._s)

    def next_u64(self) -> int:
        s = self._s
        result = (_rotl((s[1] * 5) & _MASK, 7) * 9) & _MASK
        t = (s[1] << 17) & _MASK
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return result

    def random(self) -> float:
        """Uniform double in [0, 1) with 53-bit resolution."""
        return (self.next_u64() >> 11) * (2.0 ** -53)

    def normal(self) -> float:
        """Standard normal via the polar method; discards the pair's twin."""
        while True:
            u = 2.0 * self.random() - 1.0
            v = 2.0 * self.random() - 1.0
            s = u * u + v * v
            if 0.0 < s < 1.0:
                return u * math.sqrt(-2.0 * math.log(s) / s)
