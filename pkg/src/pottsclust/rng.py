"""Portable counter-based random stream (SplitMix64).

Draw ``i`` of the stream with key ``k`` is ``mix(k + (i + 1) * GOLDEN)``
where ``mix`` is the SplitMix64 finalizer, all arithmetic mod 2**64. A
uniform double in the open interval (0, 1) is ``((x >> 11) + 0.5) * 2**-53``.
Because each draw is a pure function of (key, counter), the numba and numpy
kernels reproduce the same numbers, and streams split by deriving new keys:

    key(seed)            = mix(seed + GOLDEN)
    key(seed, a, b, ...) = mix(key(seed, a, ...) ^ mix(b + GOLDEN))   (left fold)
"""

from __future__ import annotations

import numpy as np

GOLDEN = 0x9E3779B97F4A7C15
_M64 = (1 << 64) - 1
_INV53 = 1.0 / (1 << 53)


def mix64(z: int) -> int:
    z &= _M64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
    return z ^ (z >> 31)


def derive_key(seed: int, *path: int) -> int:
    k = mix64((int(seed) + GOLDEN) & _M64)
    for p in path:
        k = mix64(k ^ mix64((int(p) + GOLDEN) & _M64))
    return k


def uniform_block(key: int, start: int, count: int) -> np.ndarray:
    """Draws ``start .. start + count - 1`` of stream ``key`` as open-interval uniforms."""
    with np.errstate(over="ignore"):
        idx = np.arange(start + 1, start + count + 1, dtype=np.uint64)
        z = np.uint64(key) + idx * np.uint64(GOLDEN)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        z = z ^ (z >> np.uint64(31))
    return ((z >> np.uint64(11)).astype(np.float64) + 0.5) * _INV53


class CounterStream:
    """Sequential reader over one keyed stream."""

    def __init__(self, key: int, counter: int = 0):
        self.key = int(key) & _M64
        self.counter = int(counter)

    def uniform(self, count: int) -> np.ndarray:
        out = uniform_block(self.key, self.counter, count)
        self.counter += count
        return out
