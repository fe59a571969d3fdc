"""Seeded pseudorandom stream with a fixed, portable algorithm.

SplitMix64 is used everywhere randomness is needed so that generated
models are reproducible bit-for-bit from a 64-bit seed, in any language:

* state advances by the golden-ratio increment 0x9E3779B97F4A7C15,
* the output runs through the standard two-round mix,
* uniform doubles take the top 53 bits scaled by 2**-53,
* bounded integers reduce ``next_u64() % n``.
"""

from __future__ import annotations

_MASK = (1 << 64) - 1


class SplitMix64:
    """SplitMix64 generator over 64-bit state."""

    def __init__(self, seed: int):
        self._state = seed & _MASK

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return (z ^ (z >> 31)) & _MASK

    def random(self) -> float:
        """Uniform double in [0, 1) with 53 bits of resolution."""
        return (self.next_u64() >> 11) * 2.0**-53

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.random()

    def randbelow(self, n: int) -> int:
        """Integer in [0, n). Modulo reduction, documented as part of the stream."""
        if n <= 0:
            raise ValueError("randbelow requires n > 0")
        return self.next_u64() % n
