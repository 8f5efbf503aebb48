"""Reproducible random streams.

Every stream is numpy's Philox4x64-10 counter-based generator keyed by a
``SeedSequence`` built from integer words ``(seed, *keys)``. Nothing depends on
call order, so pixels, channels and trials can be scheduled in any order.
"""
from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def stream(seed: int, *keys: int) -> np.random.Generator:
    words = [int(seed) & _MASK64, *(int(k) & _MASK64 for k in keys)]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(words)))


# domain tags keep streams for different purposes disjoint
PIXEL_SAMPLES = 0x5A4D
COUNTING = 0xC0DE
