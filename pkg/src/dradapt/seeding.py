"""Deterministic, platform-independent seed derivation.

All randomized behavior in the package is keyed to a single 64-bit base
seed. Sub-streams (per trial, per technique, per dataset) are derived by
hashing the base seed together with string/integer tags, so results do not
depend on call order, worker count, or ``PYTHONHASHSEED``.
"""

import hashlib

import numpy as np

MASK64 = (1 << 64) - 1


def derive_seed(base_seed: int, *tags) -> int:
    """Derive a 64-bit child seed from a base seed and a tag sequence."""
    h = hashlib.sha256()
    h.update(str(int(base_seed) & MASK64).encode())
    for tag in tags:
        h.update(b"/")
        h.update(str(tag).encode())
    return int.from_bytes(h.digest()[:8], "little")


def generator(seed: int, *tags) -> np.random.Generator:
    """Seeded PCG64 generator, optionally on a derived sub-stream."""
    if tags:
        seed = derive_seed(seed, *tags)
    return np.random.Generator(np.random.PCG64(seed & MASK64))
