"""SplitMix64 stream and the deterministic draws built on it.

Output ``i`` (1-based) of a stream seeded with ``s`` depends only on
``s + i * GOLDEN mod 2**64``, so whole blocks are generated vectorized.
"""
import numpy as np

GOLDEN = 0x9E3779B97F4A7C15
_MASK = (1 << 64) - 1
_TWO_POW_53 = float(2**53)


def _mix(z):
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


class SplitMix64:
    """Counter-style SplitMix64; ``take(n)`` returns the next ``n`` outputs as uint64."""

    def __init__(self, seed):
        if not 0 <= int(seed) <= _MASK:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
        self.seed = int(seed)
        self.position = 0

    def take(self, n):
        steps = np.arange(self.position + 1, self.position + 1 + n, dtype=np.uint64)
        with np.errstate(over="ignore"):
            state = np.uint64(self.seed) + steps * np.uint64(GOLDEN)
            out = _mix(state)
        self.position += n
        return out

    def next_u64(self):
        return int(self.take(1)[0])

    def uniform53(self, n):
        """``n`` doubles in [0, 1) from the top 53 bits of each output."""
        return (self.take(n) >> np.uint64(11)).astype(np.float64) / _TWO_POW_53

    def gaussian(self, n):
        """``n`` standard normal deviates by Box-Muller, two per pair of outputs.

        For each pair ``(u, v)``: ``r = sqrt(-2 ln(1 - u))``, then
        ``r cos(2 pi v)`` and ``r sin(2 pi v)`` in that order.
        """
        pairs = (n + 1) // 2
        u = self.uniform53(2 * pairs).reshape(pairs, 2)
        r = np.sqrt(-2.0 * np.log1p(-u[:, 0]))
        theta = 2.0 * np.pi * u[:, 1]
        z = np.empty((pairs, 2))
        z[:, 0] = r * np.cos(theta)
        z[:, 1] = r * np.sin(theta)
        return z.reshape(-1)[:n]


def random_bits(seed, length):
    """Most significant bit of each of the first ``length`` outputs."""
    if length < 1:
        raise ValueError(f"length must be positive, got {length}")
    return (SplitMix64(seed).take(length) >> np.uint64(63)).astype(np.uint8)
