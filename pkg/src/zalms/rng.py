"""Seeded random streams.

Every stream is a ``numpy.random.Generator`` over the Philox-4x64
counter-based bit generator. Gaussian draws come from NumPy's ziggurat
sampler (``standard_normal``). No module-level generator exists; each
caller builds its own stream from an explicit 64-bit seed.

Trial streams are keyed by ``derive_seed(base_seed, trial, tag)``, a
BLAKE2b-64 digest of the three fields, so different trials and different
tags (``"input"``, ``"noise"``, ``"system/<label>/<segment>"``) never
share generator state.
"""

from __future__ import annotations

import hashlib

import numpy as np

SEED_MAX = 2**64 - 1


def check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed <= SEED_MAX:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(check_seed(seed)))


def derive_seed(base_seed: int, trial: int, tag: str) -> int:
    """Deterministic 64-bit seed for one (trial, stream) pair."""
    key = f"{check_seed(base_seed)}:{int(trial)}:{tag}".encode()
    return int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "little")
