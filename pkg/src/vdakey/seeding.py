"""Counter-based seed derivation.

Every random stream is addressed as ``(master_seed, counter...)`` and built
with :class:`numpy.random.SeedSequence` using the counters as the spawn key.
A chunk of work therefore always sees the same stream, whatever the number
of worker threads or the order in which chunks are scheduled.
"""

from __future__ import annotations

import numpy as np


def rng_for(master_seed: int, *counters: int) -> np.random.Generator:
    """Return the generator for stream ``counters`` under ``master_seed``."""
    seq = np.random.SeedSequence(entropy=int(master_seed), spawn_key=tuple(int(c) for c in counters))
    return np.random.default_rng(seq)


def child_seed(rng: np.random.Generator) -> int:
    """Draw a 63-bit master seed from ``rng`` for a counter-derived family."""
    return int(rng.integers(0, 2**63 - 1))
