"""
Deterministic point generator.

splitmix64 with the published constants; the i-th draw for seed s is

    z = s + (i + 1) * 0x9E3779B97F4A7C15           (mod 2^64)
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    z = z ^ (z >> 31)
    u = (z >> 11) * 2^-53                           in [0, 1)

so any implementation reproduces the same points from the same seed.
"""
import numpy as np

GOLDEN_GAMMA = np.uint64(0x9E3779B97F4A7C15)
MIX_1 = np.uint64(0xBF58476D1CE4E5B9)
MIX_2 = np.uint64(0x94D049BB133111EB)


def splitmix64(seed: int, count: int) -> np.ndarray:
    """Return ``count`` raw 64-bit outputs for ``seed``."""
    with np.errstate(over='ignore'):
        i = np.arange(1, count + 1, dtype=np.uint64)
        z = np.uint64(seed % (1 << 64)) + i * GOLDEN_GAMMA
        z = (z ^ (z >> np.uint64(30))) * MIX_1
        z = (z ^ (z >> np.uint64(27))) * MIX_2
        z = z ^ (z >> np.uint64(31))
    return z


def uniform(seed: int, count: int) -> np.ndarray:
    """``count`` doubles in [0, 1)."""
    z = splitmix64(seed, count)
    return (z >> np.uint64(11)).astype(np.float64) * 2.0 ** -53


def uniform_points(seed: int, count: int, a: float, b: float, sort: bool = True) -> np.ndarray:
    """``count`` points in [a, b), sorted ascending unless ``sort`` is False."""
    pts = a + (b - a) * uniform(seed, count)
    pts = np.minimum(pts, b)
    return np.sort(pts) if sort else pts
