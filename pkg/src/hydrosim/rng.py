"""Deterministic per-subsystem random streams.

Each subsystem gets its own counter-based generator keyed by (master seed,
label), so adding or removing a consumer never perturbs the draws any other
subsystem sees.
"""

from __future__ import annotations

import hashlib

import numpy as np


def stream(seed: int, label: str) -> np.random.Generator:
    digest = hashlib.sha256(f"{seed}:{label}".encode()).digest()
    key = int.from_bytes(digest[:16], "little")
    return np.random.Generator(np.random.Philox(key=key))
