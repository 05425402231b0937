"""Seed plumbing. Every random draw in the package flows from an explicit seed."""

from __future__ import annotations

from typing import Sequence, Union

import numpy as np

Seed = Union[int, Sequence[int], np.random.Generator]


def make_rng(seed: Seed) -> np.random.Generator:
    """Build (or pass through) a generator from an int or a tuple of ints."""
    if isinstance(seed, np.random.Generator):
        return seed
    if seed is None:
        raise ValueError("an explicit seed is required")
    if isinstance(seed, (tuple, list)):
        return np.random.default_rng([int(x) for x in seed])
    return np.random.default_rng(int(seed))


def random_bit_ints(nbits: int, count: int, rng: np.random.Generator) -> list[int]:
    """Uniform nbits-wide bitmasks as ints, drawn from one bulk byte request."""
    nbytes = (nbits + 7) // 8
    mask = (1 << nbits) - 1
    raw = memoryview(rng.bytes(nbytes * count))
    return [
        int.from_bytes(raw[i * nbytes : (i + 1) * nbytes], "little") & mask
        for i in range(count)
    ]
