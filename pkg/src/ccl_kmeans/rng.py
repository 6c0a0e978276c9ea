"""SplitMix64 random stream.

SplitMix64 is counter based: the i-th output only depends on ``seed + i*GAMMA``,
so bulk draws are vectorized with wrapping uint64 arithmetic and stay
identical to repeated scalar draws.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_INV53 = 2.0**-53


def _mix(z: int) -> int:
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


class Rng:
    """Deterministic 64-bit generator; the whole library draws from this."""

    def __init__(self, seed: int = 0):
        self.state = int(seed) & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GAMMA) & MASK64
        return _mix(self.state)

    def next_float(self) -> float:
        """Uniform real in [0, 1)."""
        return (self.next_u64() >> 11) * _INV53

    def u64_array(self, m: int) -> np.ndarray:
        if m < 0:
            raise ValueError("m must be non-negative")
        steps = np.arange(1, m + 1, dtype=np.uint64)
        with np.errstate(over="ignore"):
            z = np.uint64(self.state) + steps * np.uint64(GAMMA)
            z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
            z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
            z = z ^ (z >> np.uint64(31))
        self.state = (self.state + m * GAMMA) & MASK64
        return z

    def floats(self, m: int) -> np.ndarray:
        return (self.u64_array(m) >> np.uint64(11)).astype(np.float64) * _INV53

    def below(self, n: int) -> int:
        """Unbiased integer in [0, n) by rejection."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            r = self.next_u64()
            if r < limit:
                return r % n

    def normals(self, m: int) -> np.ndarray:
        """Standard normal draws via Box-Muller, two per pair of uniforms."""
        pairs = (m + 1) // 2
        u = self.floats(2 * pairs).reshape(pairs, 2)
        radius = np.sqrt(-2.0 * np.log1p(-u[:, 0]))  # 1 - u in (0, 1]
        theta = 2.0 * np.pi * u[:, 1]
        z = np.empty((pairs, 2))
        z[:, 0] = radius * np.cos(theta)
        z[:, 1] = radius * np.sin(theta)
        return z.ravel()[:m]
