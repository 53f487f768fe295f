"""Text embeddings, including the deterministic hash embedder used offline.

The hash embedder maps each lowercase alphanumeric token to one of D
buckets via FNV-1a 64-bit, counts tokens per bucket, and normalizes the
count vector to unit length. It depends only on the multiset of tokens,
never on their order, and is identical across platforms.
"""

from __future__ import annotations

import re
from typing import Iterable, Protocol

import numpy as np

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = 0xFFFFFFFFFFFFFFFF

_TOKEN = re.compile(r"[a-z0-9]+")

DEFAULT_DIMENSION = 64


def fnv1a64(data: bytes) -> int:
    """FNV-1a 64-bit hash, fixed across platforms and runs."""
    h = _FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * _FNV_PRIME) & _MASK64
    return h


def tokenize(text: str) -> list[str]:
    return _TOKEN.findall(text.lower())


class Embedder(Protocol):
    dimension: int

    def embed(self, texts: list[str]) -> list[np.ndarray]:
        """One unit vector per input text, order preserving."""
        ...


class HashEmbedder:
    """Deterministic stand-in for a learned embedder."""

    def __init__(self, dimension: int = DEFAULT_DIMENSION) -> None:
        if dimension < 2:
            raise ValueError("dimension must be >= 2")
        self.dimension = dimension

    def embed_one(self, text: str) -> np.ndarray:
        counts = np.zeros(self.dimension, dtype=np.float64)
        for token in tokenize(text):
            counts[fnv1a64(token.encode("utf-8")) % self.dimension] += 1.0
        norm = float(np.sqrt(np.dot(counts, counts)))
        if norm == 0.0:
            # Defined degenerate case: no tokens at all -> e_0.
            counts[0] = 1.0
            return counts
        return counts / norm

    def embed(self, texts: Iterable[str]) -> list[np.ndarray]:
        return [self.embed_one(t) for t in texts]


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    na = float(np.sqrt(np.dot(a, a)))
    nb = float(np.sqrt(np.dot(b, b)))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(np.dot(a, b)) / (na * nb)
