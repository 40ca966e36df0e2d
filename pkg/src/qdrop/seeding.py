"""Deterministic hierarchical random streams.

Every stochastic component derives its generator from a label tuple such as
``(master_seed, "sweep", depth, scheme, trial)``.  Labels are hashed with
SHA-256, so streams for distinct tuples are independent and adding new labels
elsewhere never perturbs existing ones.  Results are reproducible across
processes and platforms (no reliance on Python's randomized ``hash``).
"""

from __future__ import annotations

import hashlib

import numpy as np

Label = int | float | str | bytes | tuple


def seed_sequence(*labels: Label) -> np.random.SeedSequence:
    """Hash a label tuple into a ``SeedSequence``."""
    h = hashlib.sha256()
    for label in labels:
        h.update(repr(label).encode())
        h.update(b"\x1f")
    digest = h.digest()
    words = [int.from_bytes(digest[i : i + 4], "little") for i in range(0, 32, 4)]
    return np.random.SeedSequence(words)


def rng_for(*labels: Label) -> np.random.Generator:
    """PCG64 generator seeded from the label tuple."""
    return np.random.default_rng(seed_sequence(*labels))
