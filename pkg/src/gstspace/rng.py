"""SplitMix64, counter form.

Output ``i`` (0-based) of the generator seeded with ``s`` is
``mix(s + (i + 1) * GAMMA)`` modulo ``2**64``, so any position of the
stream can be computed directly.  That makes sub-streams and vectorized
generation trivial and keeps runs bit-identical across chunkings.

Reference vector (seed 1234567): 6457827717110365317,
3203168211198807973, 9817491932198370423, 4593380528125082431,
16408922859458223821.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

MASK = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
M1 = 0xBF58476D1CE4E5B9
M2 = 0x94D049BB133111EB


def mix(z: int) -> int:
    z &= MASK
    z = ((z ^ (z >> 30)) * M1) & MASK
    z = ((z ^ (z >> 27)) * M2) & MASK
    return z ^ (z >> 31)


class SplitMix64:
    """Scalar reference implementation."""

    def __init__(self, seed: int):
        self.state = seed & MASK

    def next(self) -> int:
        self.state = (self.state + GAMMA) & MASK
        return mix(self.state)


def substream(seed: int, index: int) -> int:
    """State of sub-stream ``index``: the ``index``-th output of the parent stream."""
    return mix(seed + (index + 1) * GAMMA)


def block(state: int, start: int, count: int) -> np.ndarray:
    """Outputs ``start .. start + count - 1`` of the stream seeded with ``state`` (uint64)."""
    with np.errstate(over="ignore"):
        i = np.arange(start + 1, start + count + 1, dtype=np.uint64)
        z = np.uint64(state & MASK) + i * np.uint64(GAMMA)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(M1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(M2)
        return z ^ (z >> np.uint64(31))


def threshold(p) -> int:
    """``ceil(p * 2**53)`` computed exactly; ``u < p`` iff ``(z >> 11) < threshold(p)``."""
    p = Fraction(p)
    return -((-p.numerator << 53) // p.denominator)
