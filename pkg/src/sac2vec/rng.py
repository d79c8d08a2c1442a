"""Counter-style SplitMix64 streams usable from numba kernels.

Every walk and every training chunk gets its own stream whose seed is a hash
of (seed, round, node), so serial and parallel runs draw identical numbers.
"""

import numpy as np
from numba import njit

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV53 = 1.0 / 9007199254740992.0  # 2**-53


@njit(cache=True)
def mix64(z):
    z = (z ^ (z >> _S30)) * _MIX1
    z = (z ^ (z >> _S27)) * _MIX2
    return z ^ (z >> _S31)


@njit(cache=True)
def next_u64(state):
    """Advance a one-element uint64 state array and return 64 random bits."""
    state[0] = state[0] + _GOLDEN
    return mix64(state[0])


@njit(cache=True)
def next_double(state):
    """Uniform float in [0, 1) with 53 bits of precision."""
    return np.float64(next_u64(state) >> _S11) * _INV53


@njit(cache=True)
def next_below(state, m):
    """Uniform integer in [0, m)."""
    v = np.int64(next_double(state) * m)
    return v if v < m else m - 1


@njit(cache=True)
def derive_seed(seed, a, b):
    """Stream seed for the (a, b) sub-stream of ``seed``."""
    h = mix64(np.uint64(seed) + _GOLDEN)
    h = mix64(h ^ (np.uint64(a) * _MIX1 + _GOLDEN))
    h = mix64(h ^ (np.uint64(b) * _MIX2 + _GOLDEN))
    return h


class RandomStream:
    """A seeded stream for the single-step Python entry points."""

    def __init__(self, seed=0, a=0, b=0):
        self.state = np.array([derive_seed(np.uint64(seed & 0xFFFFFFFFFFFFFFFF), a, b)], dtype=np.uint64)

    def random(self):
        return next_double(self.state)

    def integers(self, m):
        return int(next_below(self.state, m))
