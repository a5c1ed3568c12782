"""Counter-based random streams for reproducible parallel Monte Carlo.

Every draw is a pure function of (key, counter), so ensembles can be
partitioned across workers in any order without changing a single bit of
the output.  Keys are derived with the splitmix64 finalizer; normals come
from Box-Muller on the hashed counter stream.
"""
from __future__ import annotations

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX_A = np.uint64(0xBF58476D1CE4E5B9)
_MIX_B = np.uint64(0x94D049BB133111EB)
_U1 = np.uint64(1)
_TWO_M53 = 2.0 ** -53


def _finalize(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _MIX_A
    z = (z ^ (z >> np.uint64(27))) * _MIX_B
    return z ^ (z >> np.uint64(31))


def mix(key, index):
    """Derive child keys from ``key``; vectorized over either argument.

    ``mix(seed, i)`` is the per-sample seed contract used everywhere: it is
    independent of how samples are batched.
    """
    with np.errstate(over="ignore"):
        keys = np.asarray(key, dtype=np.uint64)
        idx = np.asarray(index, dtype=np.uint64)
        return _finalize(keys + _GOLDEN * (idx + _U1))


def normal_pair(keys, counter: int):
    """Two independent standard normals per key at integer step ``counter``."""
    with np.errstate(over="ignore"):
        keys = np.asarray(keys, dtype=np.uint64)
        c = np.uint64(2 * counter)
        b1 = _finalize(keys + _GOLDEN * (c + _U1))
        b2 = _finalize(keys + _GOLDEN * (c + np.uint64(2)))
    # u1 in (0, 1] so the log is finite; u2 in [0, 1).
    u1 = ((b1 >> np.uint64(11)).astype(np.float64) + 1.0) * _TWO_M53
    u2 = (b2 >> np.uint64(11)).astype(np.float64) * _TWO_M53
    radius = np.sqrt(-2.0 * np.log(u1))
    angle = 2.0 * np.pi * u2
    return radius * np.cos(angle), radius * np.sin(angle)
