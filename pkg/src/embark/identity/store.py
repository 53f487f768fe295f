"""Chunked, embedded document store with exact cosine retrieval.

Chunking is character based: with chunk size ``size`` and ``overlap``
characters shared between neighbours, chunk k starts at ``k * (size -
overlap)`` and the last chunk ends at the document length. The number of
chunks for a document of length L is ``ceil(max(L - overlap, 1) / (size -
overlap))``, which stops tiling once the text is fully covered.

Retrieval is an exact scan: stores stay desk-scale here, and exactness is
what makes brute-force oracle testing possible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from embark.llm.embeddings import Embedder, HashEmbedder

DEFAULT_CHUNK_SIZE = 512
DEFAULT_OVERLAP = 64
MIN_CHUNK_SIZE = 32


class EmptyDocument(ValueError):
    """Ingest refuses documents with an empty body."""


class EmptyStore(ValueError):
    """Queries need at least one chunk."""


@dataclass(frozen=True)
class SourceDocument:
    id: str
    title: str
    body: str


@dataclass(frozen=True)
class Chunk:
    doc_id: str
    seq: int
    span: tuple[int, int]  # [start, end) character offsets into the body
    text: str


def chunk_spans(length: int, size: int, overlap: int) -> list[tuple[int, int]]:
    """Character spans tiling [0, length) with the configured overlap."""
    if size < MIN_CHUNK_SIZE:
        raise ValueError(f"chunk size must be >= {MIN_CHUNK_SIZE}")
    if not 0 <= overlap < size:
        raise ValueError("overlap must satisfy 0 <= overlap < size")
    step = size - overlap
    count = math.ceil(max(length - overlap, 1) / step)
    spans = []
    for k in range(count):
        start = k * step
        end = min(start + size, length)
        if k == count - 1:
            end = length
        spans.append((start, end))
    return spans


class ChunkStore:
    """Immutable once built; queries are free to run concurrently."""

    def __init__(self, chunks: Sequence[Chunk], vectors: np.ndarray, embedder: Embedder) -> None:
        self.chunks = list(chunks)
        self._vectors = vectors
        self._norms = [float(np.sqrt(np.dot(v, v))) for v in vectors]
        self.embedder = embedder

    def __len__(self) -> int:
        return len(self.chunks)

    def query(self, question: str, k: int) -> list[tuple[Chunk, float]]:
        """Exact top-k by cosine similarity.

        Ties break by (doc_id, seq) ascending; k beyond the store size
        returns everything.
        """
        if not self.chunks:
            raise EmptyStore("store has no chunks")
        if k < 1:
            raise ValueError("k must be >= 1")
        qvec = self.embedder.embed([question])[0]
        qnorm = float(np.sqrt(np.dot(qvec, qvec)))
        scored = []
        for i, chunk in enumerate(self.chunks):
            denom = qnorm * self._norms[i]
            score = float(np.dot(qvec, self._vectors[i])) / denom if denom else 0.0
            scored.append((chunk, score))
        scored.sort(key=lambda cs: (-cs[1], cs[0].doc_id, cs[0].seq))
        return scored[: min(k, len(scored))]


def ingest(
    docs: Sequence[SourceDocument],
    size: int = DEFAULT_CHUNK_SIZE,
    overlap: int = DEFAULT_OVERLAP,
    embedder: Embedder | None = None,
) -> ChunkStore:
    """Chunk and embed every document into a fresh store."""
    embedder = embedder if embedder is not None else HashEmbedder()
    chunks: list[Chunk] = []
    for doc in docs:
        if not doc.body:
            raise EmptyDocument(f"document {doc.id!r} has an empty body")
        for seq, (start, end) in enumerate(chunk_spans(len(doc.body), size, overlap)):
            chunks.append(Chunk(doc.id, seq, (start, end), doc.body[start:end]))
    if chunks:
        vectors = np.stack(embedder.embed([c.text for c in chunks]))
    else:
        vectors = np.zeros((0, getattr(embedder, "dimension", 1)))
    return ChunkStore(chunks, vectors, embedder)
