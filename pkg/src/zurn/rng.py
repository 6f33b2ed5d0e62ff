"""Deterministic per-realization random streams.

Every realization of an experiment owns one stream, keyed by
``(master_seed, realization_index)``.  Streams are backed by the Philox
counter-based bit generator; the key mixing is done by
``numpy.random.SeedSequence(master_seed, spawn_key=(realization_index,))``,
which is numpy's documented mechanism for deriving statistically
independent child streams from one seed.  Reconstructing a stream with the
same pair replays the identical sequence, so realizations can be run in any
order, on any number of workers, and re-run bit-for-bit.
"""

from __future__ import annotations

import numpy as np


class RngStream:
    """One replayable random stream for a single realization."""

    __slots__ = ("master_seed", "realization_index", "gen")

    def __init__(self, master_seed: int, realization_index: int = 0):
        if realization_index < 0:
            raise ValueError(f"realization_index must be >= 0, got {realization_index}")
        self.master_seed = int(master_seed) & (2**64 - 1)
        self.realization_index = int(realization_index)
        ss = np.random.SeedSequence(self.master_seed, spawn_key=(self.realization_index,))
        self.gen = np.random.Generator(np.random.Philox(ss))

    def integers(self, low, high=None, size=None):
        """Uniform integers in [low, high); exact (Lemire bounded-range, no modulo bias)."""
        return self.gen.integers(low, high=high, size=size)

    def uniform(self, low=0.0, high=1.0, size=None):
        return self.gen.uniform(low, high, size=size)

    def exponential(self, scale=1.0, size=None):
        return self.gen.exponential(scale, size=size)

    def gamma(self, shape, scale=1.0, size=None):
        return self.gen.gamma(shape, scale, size=size)

    def __repr__(self):
        return f"RngStream(master_seed={self.master_seed}, realization_index={self.realization_index})"
