"""Seeded 64-bit randomness: splitmix64 seeding xoshiro256**.

Every consumer draws from its own substream keyed by ``(seed, stream, index)``
so that enabling randomness in one place never shifts another sequence.
"""

from __future__ import annotations

from enum import IntEnum
from typing import List, Sequence, Tuple, TypeVar

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15

T = TypeVar("T")


class StreamId(IntEnum):
    MOBILITY = 1
    TRAFFIC = 2
    PROTOCOL = 3


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & _MASK64


def splitmix64(state: int) -> Tuple[int, int]:
    """Return ``(next_state, output)`` for one splitmix64 step."""

    state = (state + _GOLDEN) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return state, z ^ (z >> 31)


class Xoshiro256:
    """xoshiro256** generator seeded through splitmix64."""

    __slots__ = ("_s",)

    def __init__(self, seed: int) -> None:
        state = seed & _MASK64
        words: List[int] = []
        for _ in range(4):
            state, out = splitmix64(state)
            words.append(out)
        if not any(words):
            words[0] = 1
        self._s = words

    def next_u64(self) -> int:
        s = self._s
        result = (_rotl((s[1] * 5) & _MASK64, 7) * 9) & _MASK64
        t = (s[1] << 17) & _MASK64
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return result

    def random(self) -> float:
        """Uniform float in [0, 1) with 53 bits of precision."""

        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def uniform(self, low: float, high: float) -> float:
        return low + (high - low) * self.random()

    def randbelow(self, n: int) -> int:
        if n <= 0:
            raise ValueError("n must be positive")
        return (self.next_u64() * n) >> 64

    def choice(self, items: Sequence[T]) -> T:
        return items[self.randbelow(len(items))]


def substream(seed: int, stream: StreamId, index: int = 0) -> Xoshiro256:
    """Independent generator for one consumer (a node, a flow table, ...)."""

    state = seed & _MASK64
    for word in (int(stream), index):
        state, mixed = splitmix64(state ^ (word & _MASK64))
        state = mixed
    return Xoshiro256(state)


__all__ = ["StreamId", "Xoshiro256", "splitmix64", "substream"]
