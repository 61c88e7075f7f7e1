"""Deterministic seed derivation.

A single process-global RNG is forbidden everywhere in this package: every
randomized operation takes an explicit seed, and experiment drivers derive
per-call seeds from the config seed, a module tag, and a trial index so that
serial and parallel runs agree byte for byte.
"""

from __future__ import annotations

import hashlib


def derive_seed(root: int, *tags: object) -> int:
    payload = "|".join([str(root), *(str(t) for t in tags)]).encode()
    return int.from_bytes(hashlib.sha256(payload).digest()[:8], "big")
