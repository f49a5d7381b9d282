"""Deterministic seed derivation so results never depend on scheduling.

Every stochastic unit of work (one trajectory, one frame, one graph draw)
derives its generator from a tuple of integers fed to numpy's SeedSequence;
worker count and execution order therefore cannot change any result.
"""
from __future__ import annotations

import numpy as np


def seed_sequence(*parts: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([int(p) & 0xFFFFFFFFFFFFFFFF for p in parts])


def make_rng(seed) -> np.random.Generator:
    """Generator from an int, a SeedSequence, or pass-through for a Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, np.random.SeedSequence):
        return np.random.default_rng(seed)
    return np.random.default_rng(np.random.SeedSequence(int(seed) & 0xFFFFFFFFFFFFFFFF))
