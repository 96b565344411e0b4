"""Deterministic sub-seeding for Monte Carlo trials.

Every random draw in the package goes through ``numpy.random.default_rng``
(PCG64). Independent streams are derived from a single master seed by XORing
it with a splitmix64 hash of a stream counter, so any run is reproducible
from (master seed, counter) alone.
"""

import numpy as np

_MASK64 = 0xFFFFFFFFFFFFFFFF


def splitmix64(x):
    """One splitmix64 step: a well-mixed 64-bit hash of the integer ``x``."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (x ^ (x >> 31)) & _MASK64


def substream_seed(master_seed, counter):
    """Seed for the ``counter``-th substream of ``master_seed``."""
    return (int(master_seed) & _MASK64) ^ splitmix64(int(counter))


def rng_from(seed_or_rng):
    """Coerce an int seed or an existing Generator into a Generator."""
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    return np.random.default_rng(seed_or_rng)


def standard_complex_normal(rng, shape):
    """Proper complex standard normal draws: CN(0, 1) per entry."""
    re = rng.standard_normal(shape)
    im = rng.standard_normal(shape)
    return (re + 1j * im) / np.sqrt(2.0)
