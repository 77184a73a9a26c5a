"""SplitMix64: the single portable PRNG behind all sampling and seed derivation.

SplitMix64 was chosen because it is a handful of integer ops, has no state
beyond one 64-bit word, and reproduces bit-exactly in any language, so golden
files stay valid everywhere.
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def mix64(z: int) -> int:
    """SplitMix64 finalizer on a plain Python int (mod 2^64)."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK
    return z ^ (z >> 31)


def splitmix64_at(seed: int, index: int) -> int:
    """The index-th (0-based) output of the SplitMix64 stream seeded by `seed`."""
    return mix64((seed + (index + 1) * _GOLDEN) & _MASK)


def splitmix64_words(seed: int, count: int) -> np.ndarray:
    """First `count` outputs of the stream as a uint64 array.

    Vectorized form of repeatedly calling next(); uint64 arithmetic wraps
    mod 2^64 exactly like the scalar reference.
    """
    idx = np.arange(1, count + 1, dtype=np.uint64)
    z = np.uint64(seed & _MASK) + idx * np.uint64(_GOLDEN)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
    return z ^ (z >> np.uint64(31))


def uniform_indices(words: np.ndarray, c: int) -> np.ndarray:
    """Map 64-bit words to uniform draws in [0, c).

    Uses the top 53 bits: floor((u >> 11) * c / 2^53). For c <= 1024 the
    product cannot overflow 64 bits, and the bias is < 2^-43.
    """
    if not 1 <= c <= 1024:
        raise ValueError(f"color count {c} outside supported range 1..1024")
    return (((words >> np.uint64(11)) * np.uint64(c)) >> np.uint64(53)).astype(np.int64)


def fnv1a64(text: str) -> int:
    """FNV-1a of the UTF-8 bytes; gives each dataset split its own seed stream."""
    h = 0xCBF29CE484222325
    for b in text.encode("utf-8"):
        h ^= b
        h = (h * 0x100000001B3) & _MASK
    return h
