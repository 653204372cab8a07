"""Keyed seed derivation.

All randomness in the toolkit flows from a single top-level seed expanded
per component through a keyed hash, so any subcomponent is reproducible in
isolation and results never depend on scheduling or iteration order.
"""

from __future__ import annotations

import hashlib

import numpy as np

_DOMAIN_TAG = b"patenteb.v1"


def derive_seed(master_seed: int, *keys: object) -> int:
    """Derive a 64-bit child seed from a master seed and a key path."""
    h = hashlib.blake2b(_DOMAIN_TAG, digest_size=8)
    h.update(str(int(master_seed)).encode("utf-8"))
    for key in keys:
        h.update(b"\x1f")
        h.update(str(key).encode("utf-8"))
    return int.from_bytes(h.digest(), "little")


def rng_for(master_seed: int, *keys: object) -> np.random.Generator:
    """Deterministic PCG64 generator for a (seed, key path) pair."""
    return np.random.Generator(np.random.PCG64(derive_seed(master_seed, *keys)))
