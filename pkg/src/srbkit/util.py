"""Small shared helpers: deterministic rng derivation and number formatting."""

from __future__ import annotations

import hashlib

import numpy as np


def derive_rng(seed: int, *labels: str) -> np.random.Generator:
    """Generator keyed by (seed, labels); stable across runs and platforms."""
    h = hashlib.sha256(("|".join(str(x) for x in labels)).encode()).digest()
    tag = int.from_bytes(h[:8], "big")
    return np.random.default_rng(np.random.SeedSequence([int(seed) & 0xFFFFFFFF, tag]))


def ffmt(x) -> str:
    """Canonical float formatting: shortest round-trip repr of a Python float."""
    return repr(float(x))


def config_hash(obj) -> str:
    """Stable short hash of a JSON-serializable configuration object."""
    import json

    payload = json.dumps(obj, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(payload.encode()).hexdigest()[:16]
