"""
Seed plumbing: one user seed fans out into independent per-replicate streams
File: src/twoscale/utils/seeding.py
"""
from typing import List, Union

import numpy as np

SeedLike = Union[int, np.random.SeedSequence, np.random.Generator]


def as_seed_sequence(seed: Union[int, np.random.SeedSequence]) -> np.random.SeedSequence:
    """Wrap a plain integer seed into a SeedSequence"""
    if isinstance(seed, np.random.SeedSequence):
        return seed
    if int(seed) < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    return np.random.SeedSequence(int(seed))


def spawn_seeds(seed: Union[int, np.random.SeedSequence], n: int) -> List[np.random.SeedSequence]:
    """Independent child sequences, one per replicate, in replicate order"""
    if n < 0:
        raise ValueError(f"cannot spawn {n} seeds")
    return as_seed_sequence(seed).spawn(n)


def make_rng(seed: SeedLike) -> np.random.Generator:
    """numpy Generator from an int, a SeedSequence or an existing Generator"""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(as_seed_sequence(seed))


def kernel_seed(rng: np.random.Generator) -> int:
    """32-bit seed for the compiled kernels, drawn from a numpy stream"""
    return int(rng.integers(0, 2**32 - 1, dtype=np.uint64))
