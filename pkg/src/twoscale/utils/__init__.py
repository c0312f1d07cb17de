"""Shared helpers for twoscale"""

from twoscale.utils.seeding import as_seed_sequence, kernel_seed, make_rng, spawn_seeds

__all__ = ["as_seed_sequence", "kernel_seed", "make_rng", "spawn_seeds"]
