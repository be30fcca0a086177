"""Deterministic 64-bit mixing used for all seeded routing decisions.

Every piece of randomness a strategy or placement mode consumes is a pure
function of (seed, tag, round, value) through these mixers, so reruns are
bit-identical regardless of call order or worker count.  The scalar and
numpy implementations compute the same function; tests assert they agree.
"""

from __future__ import annotations

import hashlib

import numpy as np

_MASK = 0xFFFFFFFFFFFFFFFF
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_K_SEED = 0x9E3779B97F4A7C15
_K_TAG = 0xC2B2AE3D27D4EB4F
_K_ROUND = 0xD1342543DE82EF95
_K_VALUE = 0xAF251AF3B0F025B5

# Tags separate the independent randomness streams (routing, placement,
# replica picks, ...) so equal integer inputs cannot collide across uses.
TAG_ROUTE = 0x01
TAG_PLACE = 0x02
TAG_REPLICA = 0x03
TAG_EXTRA = 0x04


def mix64(x: int) -> int:
    """SplitMix64 finalizer; bijective on 64-bit ints."""
    x &= _MASK
    x = ((x ^ (x >> 30)) * _M1) & _MASK
    x = ((x ^ (x >> 27)) * _M2) & _MASK
    return x ^ (x >> 31)


def bucket(seed: int, tag: int, round_no: int, value: int, n_buckets: int) -> int:
    """Pseudo-random bucket in [0, n_buckets) for (seed, tag, round, value)."""
    x = (seed * _K_SEED + tag * _K_TAG + round_no * _K_ROUND + value * _K_VALUE) & _MASK
    return mix64(mix64(x)) % n_buckets


def bucket_array(
    seed: int, tag: int, round_no: int, values: np.ndarray, n_buckets: int
) -> np.ndarray:
    """Vectorized bucket(); bit-identical to the scalar form."""
    base = (seed * _K_SEED + tag * _K_TAG + round_no * _K_ROUND) & _MASK
    x = np.asarray(values, dtype=np.uint64) * np.uint64(_K_VALUE) + np.uint64(base)
    for _ in range(2):
        x = x ^ (x >> np.uint64(30))
        x = x * np.uint64(_M1)
        x = x ^ (x >> np.uint64(27))
        x = x * np.uint64(_M2)
        x = x ^ (x >> np.uint64(31))
    return (x % np.uint64(n_buckets)).astype(np.int64)


def stable_seed(*parts) -> int:
    """Derive a 63-bit integer seed from arbitrary printable parts.

    Uses blake2b over the joined repr, so it is stable across processes
    and interpreter runs (unlike the builtin hash).
    """
    h = hashlib.blake2b("\x1f".join(str(p) for p in parts).encode(), digest_size=8)
    return int.from_bytes(h.digest(), "big") >> 1
