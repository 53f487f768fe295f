"""Embodiment store: identity documents, retrieval, prompts, and assets."""

from embark.identity.store import (
    Chunk,
    ChunkStore,
    EmptyDocument,
    EmptyStore,
    SourceDocument,
    chunk_spans,
    ingest,
)
from embark.identity.bundle import (
    Asset,
    AssetKind,
    EmbodimentCondition,
    IdentityBundle,
    UnknownAsset,
    WrongKind,
    attach_self_image,
    build_system_prompt,
    load_bundle,
    opening_user_message,
)

__all__ = [
    "Asset",
    "AssetKind",
    "Chunk",
    "ChunkStore",
    "EmbodimentCondition",
    "EmptyDocument",
    "EmptyStore",
    "IdentityBundle",
    "SourceDocument",
    "UnknownAsset",
    "WrongKind",
    "attach_self_image",
    "build_system_prompt",
    "chunk_spans",
    "ingest",
    "load_bundle",
    "opening_user_message",
]
