"""Token hashing for text features: FNV-1a 64-bit over lowercase tokens."""
from __future__ import annotations

import re
from typing import List

import numpy as np

FNV_BASIS = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3
_MASK = (1 << 64) - 1
_SPLIT = re.compile(r"[^0-9a-z]+")


def fnv1a_64(data: bytes) -> int:
    h = FNV_BASIS
    for byte in data:
        h ^= byte
        h = (h * FNV_PRIME) & _MASK
    return h


def tokenize(text: str) -> List[str]:
    return [t for t in _SPLIT.split(text.lower()) if t]


def hashed_token_counts(text: str, size: int) -> np.ndarray:
    """Counts of tokens folded into `size` buckets by FNV-1a."""
    v = np.zeros(size, np.float64)
    for token in tokenize(text):
        v[fnv1a_64(token.encode("utf-8")) % size] += 1.0
    return v
