"""Deterministic RNG derivation.

Every stochastic routine in the package takes an integer seed and derives a
counter-based Philox stream from it.  Sub-streams (one per trace, per noise
channel, per block...) are derived from (seed, *path) so that trace-level
parallelism or reordering can never change results.
"""

from __future__ import annotations

import zlib

import numpy as np

__all__ = ["derive_rng", "derive_seed_sequence"]


def _path_to_ints(path) -> tuple[int, ...]:
    out = []
    for part in path:
        if isinstance(part, str):
            out.append(zlib.crc32(part.encode("utf-8")))
        elif isinstance(part, (int, np.integer)):
            out.append(int(part) & 0xFFFFFFFF)
        else:
            raise TypeError(f"seed path elements must be int or str, got {type(part)!r}")
    return tuple(out)


def derive_seed_sequence(seed: int, *path) -> np.random.SeedSequence:
    return np.random.SeedSequence(entropy=int(seed) & (2**64 - 1), spawn_key=_path_to_ints(path))


def derive_rng(seed: int, *path) -> np.random.Generator:
    """Independent generator for (seed, *path); path parts are ints or labels."""
    return np.random.Generator(np.random.Philox(derive_seed_sequence(seed, *path)))
