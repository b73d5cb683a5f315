"""Named, reproducible random streams.

All randomness in a run flows from a single 64-bit seed; each module draws
from its own named stream so adding a consumer never perturbs the others.
"""

from __future__ import annotations

import zlib

import numpy as np


def named_rng(seed: int, name: str) -> np.random.Generator:
    """An independent generator for ``name``, derived from the run seed."""
    key = zlib.crc32(name.encode("utf-8"))
    return np.random.default_rng(np.random.SeedSequence(entropy=int(seed), spawn_key=(key,)))
