"""
Seeded random streams
All randomness in the repo flows through numpy Generators backed by PCG64
(O'Neill, "PCG: A Family of Simple Fast Space-Efficient Statistically Good
Algorithms for Random Number Generation", 2014). A Generator is built from a
SeedSequence, so identical seeds give identical streams on every platform.
OS entropy is never requested: a seed is always required.
"""

from typing import List

import numpy as np

from src.errors import InvalidInputError

Rng = np.random.Generator


def make_rng(seed: int, *stream: int) -> Rng:
    """Generator for `seed`, optionally keyed by extra stream ids (e.g. a checkpoint step)."""
    if seed is None or int(seed) < 0:
        raise InvalidInputError(f"Seed must be a non-negative integer, got {seed!r}")
    entropy = [int(seed), *(int(s) for s in stream)]
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))


def spawn_rngs(seed: int, n: int) -> List[Rng]:
    """n independent sub-streams of `seed`; used when work is partitioned."""
    children = np.random.SeedSequence(int(seed)).spawn(n)
    return [np.random.Generator(np.random.PCG64(child)) for child in children]


def gaussian_sample(rng: Rng, mean: float, std: float, n: int) -> np.ndarray:
    if std < 0:
        raise InvalidInputError(f"Standard deviation must be >= 0, got {std}")
    if n < 0:
        raise InvalidInputError(f"Sample count must be >= 0, got {n}")
    if std == 0:
        return np.full(n, float(mean))
    return rng.normal(loc=mean, scale=std, size=n)
