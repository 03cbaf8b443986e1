"""Splittable seed derivation.

A task seed is the first 8 bytes (little-endian) of
``blake2b(f"{master}:{tag}:{index}")``, so every (master seed, task kind,
index) triple maps to its own 64-bit stream independent of execution order.
"""

import hashlib
import secrets

import numpy as np


def derive_seed(master: int, tag: str, index: int = 0) -> int:
    digest = hashlib.blake2b(f"{int(master)}:{tag}:{int(index)}".encode(),
                             digest_size=8).digest()
    return int.from_bytes(digest, "little")


def derive_rng(master: int, tag: str, index: int = 0) -> np.random.Generator:
    return np.random.default_rng(derive_seed(master, tag, index))


def fresh_seed() -> int:
    return secrets.randbits(63)
