"""A pinned, portable pseudo-random number generator.

The generator is xoshiro256++ with its 256-bit state seeded from a 64-bit
user seed by four SplitMix64 outputs. Uniform floats use the top 53 bits of a
draw, integers use a 64-bit multiply-shift, and normals use the Box-Muller
transform on consecutive pairs of uniforms. Everything is computed with Python
integers so the sequence is identical on every platform.

Classes:
    Rng: The generator.

Functions:
    splitmix64: Advance a SplitMix64 state and return (state, output).
"""

from __future__ import annotations

from typing import Union
import math

import numpy as np

__all__ = (
    "Rng",
    "splitmix64",
)


_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_TWO_POW_53 = 1.0 / (1 << 53)

Size = Union[None, int, tuple[int, ...]]


def splitmix64(state: int) -> tuple[int, int]:
    """Advance a SplitMix64 state.

    Args:
        state: The current 64-bit state.

    Returns: The next state and the output derived from it.
    """
    state = (state + _GOLDEN) & _MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return state, z ^ (z >> 31)


def _count(size: Size) -> int:
    if size is None:
        return 1
    if isinstance(size, int):
        return size
    return math.prod(size)


def _shape(values: np.ndarray, size: Size) -> Union[float, np.ndarray]:
    if size is None:
        return values[0].item()
    return values.reshape(size)


class Rng:
    """A xoshiro256++ generator with numpy-shaped draws."""

    def __init__(self, seed: int) -> None:
        """Seed the generator.

        Args:
            seed: Any integer; it is reduced to 64 bits.
        """
        state = seed & _MASK
        words = []
        for _ in range(4):
            state, word = splitmix64(state)
            words.append(word)
        self._s = words

    @classmethod
    def from_state(cls, state: tuple[int, int, int, int]) -> Rng:
        """Create a generator with an explicit 256-bit state."""
        if len(state) != 4 or not any(state):
            raise ValueError("state must be four 64-bit words, not all zero")
        rng = cls.__new__(cls)
        rng._s = [word & _MASK for word in state]
        return rng

    @property
    def state(self) -> tuple[int, int, int, int]:
        return tuple(self._s)

    def next_u64(self) -> int:
        """Return the next raw 64-bit output."""
        return self._block(1)[0]

    def _block(self, n: int) -> list[int]:
        s0, s1, s2, s3 = self._s
        out = []
        append = out.append
        for _ in range(n):
            x = (s0 + s3) & _MASK
            append((((x << 23) | (x >> 41)) + s0) & _MASK)
            t = (s1 << 17) & _MASK
            s2 ^= s0
            s3 ^= s1
            s1 ^= s2
            s0 ^= s3
            s2 ^= t
            s3 = ((s3 << 45) | (s3 >> 19)) & _MASK
        self._s = [s0, s1, s2, s3]
        return out

    def uniform(self, size: Size = None) -> Union[float, np.ndarray]:
        """Draw floats uniformly from [0, 1)."""
        n = _count(size)
        values = np.array([(u >> 11) * _TWO_POW_53 for u in self._block(n)])
        return _shape(values, size)

    def integers(self, high: int, size: Size = None) -> Union[int, np.ndarray]:
        """Draw integers uniformly from [0, high)."""
        if high < 1:
            raise ValueError(f"high must be positive, got {high}")
        n = _count(size)
        values = np.array([(u * high) >> 64 for u in self._block(n)], dtype=np.int64)
        if size is None:
            return int(values[0])
        return values.reshape(size)

    def normal(self, size: Size = None) -> Union[float, np.ndarray]:
        """Draw standard normals with the Box-Muller transform.

        Each pair of consecutive uniforms (u1, u2) yields the pair
        r*cos(2*pi*u2), r*sin(2*pi*u2) with r = sqrt(-2 log(1 - u1)); an odd
        count discards the final sine.
        """
        n = _count(size)
        pairs = (n + 1) // 2
        u = self.uniform(2 * pairs).reshape(pairs, 2)
        radius = np.sqrt(-2.0 * np.log1p(-u[:, 0]))
        angle = 2.0 * math.pi * u[:, 1]
        values = np.stack([radius * np.cos(angle), radius * np.sin(angle)], axis=1)
        return _shape(values.reshape(-1)[:n], size)

    def spawn(self) -> Rng:
        """Return an independent child generator seeded from this one."""
        return Rng(self.next_u64())

