"""Deterministic fan-out of a root seed into independent generators.

Every randomized stage derives its generator from the root seed plus a
tuple of tags (stage name, parameter values, repetition index), so a run
is a pure function of its configuration. String tags are hashed with
CRC-32, which is stable across platforms and Python versions.
"""

from __future__ import annotations

import zlib

import numpy as np

_MASK = (1 << 64) - 1


def derive_seed_sequence(root_seed: int, *tags) -> np.random.SeedSequence:
    entropy = [int(root_seed) & _MASK]
    for tag in tags:
        if isinstance(tag, str):
            entropy.append(zlib.crc32(tag.encode("utf-8")))
        elif isinstance(tag, float):
            entropy.append(zlib.crc32(repr(tag).encode("ascii")))
        else:
            entropy.append(int(tag) & _MASK)
    return np.random.SeedSequence(entropy)


def derive_rng(root_seed: int, *tags) -> np.random.Generator:
    """Generator keyed by (root seed, *tags); identical inputs, identical stream."""
    return np.random.default_rng(derive_seed_sequence(root_seed, *tags))
