"""Seeded random streams.

Trials draw from :class:`random.Random` (fast scalar draws, stable across
platforms).  Independent streams are split off by hashing a parent seed
together with labels, so any sub-stream can be rebuilt from its labels.
"""

from __future__ import annotations

import hashlib
import random
from typing import Union

SeedLike = Union[int, random.Random]


def derive_seed(*parts) -> int:
    """64-bit seed from the ``repr`` of each part, via BLAKE2b."""
    h = hashlib.blake2b(digest_size=8)
    for part in parts:
        h.update(repr(part).encode())
        h.update(b"\x1f")
    return int.from_bytes(h.digest(), "big")


def make_rng(seed: SeedLike) -> random.Random:
    """Use ``seed`` as-is when it is already a stream, else seed a new one."""
    if isinstance(seed, random.Random):
        return seed
    return random.Random(seed)


def split(rng: random.Random, label) -> random.Random:
    """Child stream keyed by one draw from ``rng`` and ``label``."""
    return random.Random(derive_seed(rng.getrandbits(64), label))
