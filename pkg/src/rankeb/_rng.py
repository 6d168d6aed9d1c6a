"""Seeded random streams.

All randomness goes through numpy's Philox bit generator (counter based) keyed
by a SeedSequence built from integer keys, e.g. ``(seed, row_index)``. Streams
for different keys are statistically independent, so results do not depend on
evaluation order.
"""

import numpy as np

RNG_NAME = "numpy.random.Philox"


def make_rng(*keys):
    """Return a Generator keyed by a tuple of non-negative integers."""
    entropy = [int(k) & 0xFFFFFFFFFFFFFFFF for k in keys if k is not None]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy or [0])))
