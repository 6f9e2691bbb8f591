"""Counter-based random substreams.

Every trial draws from its own Philox stream keyed by ``(seed, *key)``, so a
run is bit-identical however trials are split across workers.
"""

import numpy as np


def substream(seed, *key):
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def as_generator(rng):
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)
