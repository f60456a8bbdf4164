"""Seed derivation.

Every random stream is ``random.Random(derive_seed(root, *path))`` where
``derive_seed`` hashes the root seed together with a path of component names
using BLAKE2b.  Streams for different components are independent of each
other and of the order in which they are created.
"""
from __future__ import annotations

import hashlib
import random

MASK64 = (1 << 64) - 1


def derive_seed(root: int, *path: object) -> int:
    h = hashlib.blake2b(digest_size=8)
    h.update(str(root & MASK64).encode())
    for part in path:
        h.update(b"/")
        h.update(str(part).encode())
    return int.from_bytes(h.digest(), "big")


def rng(root: int, *path: object) -> random.Random:
    return random.Random(derive_seed(root, *path))
