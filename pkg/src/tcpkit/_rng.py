"""Deterministic 64-bit PRNG used by every sampling routine in the package.

A splitmix-style generator is used instead of ``numpy.random`` so that
reports are bit-identical for a given seed across platforms and numpy
versions.  Constants are the usual splitmix64 ones:

    increment  0x9E3779B97F4A7C15
    mixer 1    0xBF58476D1CE4E5B9
    mixer 2    0x94D049BB133111EB
"""

from __future__ import annotations

import math

_MASK = (1 << 64) - 1
_INC = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


class SplitMix64:
    """Splitmix64 sequence with helpers for floats, spheres and balls."""

    def __init__(self, seed: int):
        self._state = int(seed) & _MASK
        self._gauss_cache: float | None = None

    def next_u64(self) -> int:
        self._state = (self._state + _INC) & _MASK
        z = self._state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK
        return z ^ (z >> 31)

    def uniform(self, lo: float = 0.0, hi: float = 1.0) -> float:
        """Uniform double in [lo, hi) built from the top 53 bits."""
        u = self.next_u64() >> 11
        return lo + (hi - lo) * (u * (1.0 / (1 << 53)))

    def normal(self) -> float:
        """Standard normal via Box-Muller (cached second deviate)."""
        if self._gauss_cache is not None:
            g, self._gauss_cache = self._gauss_cache, None
            return g
        while True:
            u1 = self.uniform()
            if u1 > 0.0:
                break
        u2 = self.uniform()
        r = math.sqrt(-2.0 * math.log(u1))
        self._gauss_cache = r * math.sin(2.0 * math.pi * u2)
        return r * math.cos(2.0 * math.pi * u2)

    def normals(self, k: int) -> list[float]:
        return [self.normal() for _ in range(k)]

    def on_sphere(self, k: int) -> list[float]:
        """Uniform point on the unit sphere in R^k."""
        while True:
            v = self.normals(k)
            nrm = math.sqrt(sum(c * c for c in v))
            if nrm > 1e-12:
                return [c / nrm for c in v]

    def spawn(self, salt: int) -> "SplitMix64":
        """Independent child stream; deterministic in (state, salt)."""
        return SplitMix64(self.next_u64() ^ (salt * _INC & _MASK))
