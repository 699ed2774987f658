"""Seeded, splittable random streams.

Every stream is a Philox (counter-based) generator keyed by the user seed plus
a tuple of integers naming its purpose, so data generation and each chain
never share state and any replicate can be regenerated on its own.
"""

import numpy as np

DATA = 0
CHAIN = 1
AUX = 2


def make_rng(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for ``(seed, *key)``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))
