import numpy as np


def stream(seed: int, *key: int) -> np.random.Generator:
    """Independent PCG64 stream for ``seed`` split by ``key``.

    Streams with different keys never overlap, and a given (seed, key) pair
    always yields the same sequence regardless of how many siblings exist.
    """
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=key)))
