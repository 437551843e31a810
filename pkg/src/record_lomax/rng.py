"""Keyed random streams.

Every stream is a Philox (counter-based) generator whose key is derived from
``(master_seed, *key)`` through :class:`numpy.random.SeedSequence`.  Two calls
with the same key always yield the same draws, no matter which process makes
them, so work can be split across workers without changing results.
"""
from __future__ import annotations

import numpy as np

# Stream tags keep independent purposes (sample data vs record data) apart
# under one master seed.
TAG_SAMPLE = 1
TAG_RECORDS = 2
TAG_SINGLE = 3


def stream(master_seed: int, *key: int) -> np.random.Generator:
    if master_seed < 0:
        raise ValueError("master_seed must be non-negative")
    seq = np.random.SeedSequence(int(master_seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(seq))
