"""Identity bundles: who the robot is, its rules, documents, and assets.

Directory layout::

    identity.txt          robot self-description (required)
    rules.txt             operational constraints (optional)
    docs/*.txt|*.md       documents ingested into the chunk store
    assets/manifest.json  {"asset_id": {"kind": "image"|"body_description",
                           "file": "relative path"}}

Body-description assets are surfaced to prompts verbatim; they are
identity context, not something the planner parses.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Optional

from embark.identity.store import ChunkStore, SourceDocument, ingest
from embark.llm.embeddings import Embedder
from embark.llm.messages import ChatMessage


class AssetKind(str, Enum):
    IMAGE = "image"
    BODY_DESCRIPTION = "body_description"


class UnknownAsset(KeyError):
    pass


class WrongKind(ValueError):
    pass


@dataclass(frozen=True)
class Asset:
    id: str
    kind: AssetKind
    path: Path

    def read_bytes(self) -> bytes:
        return self.path.read_bytes()

    def mime(self) -> str:
        suffix = self.path.suffix.lower()
        return {"": "application/octet-stream", ".png": "image/png", ".jpg": "image/jpeg",
                ".jpeg": "image/jpeg", ".txt": "text/plain"}.get(suffix, "application/octet-stream")


@dataclass
class IdentityBundle:
    identity_text: str
    rules_text: str = ""
    store: Optional[ChunkStore] = None
    assets: dict[str, Asset] = field(default_factory=dict)

    def asset(self, asset_id: str) -> Asset:
        if asset_id not in self.assets:
            raise UnknownAsset(asset_id)
        return self.assets[asset_id]

    def load_asset(self, asset_id: str) -> tuple[str, bytes]:
        a = self.asset(asset_id)
        return a.mime(), a.read_bytes()


@dataclass(frozen=True)
class EmbodimentCondition:
    """Language-only by default; visual when a self-image is attached."""

    image_asset: Optional[str] = None

    @property
    def visual(self) -> bool:
        return self.image_asset is not None


def attach_self_image(bundle: IdentityBundle, asset_id: str) -> EmbodimentCondition:
    asset = bundle.asset(asset_id)
    if asset.kind is not AssetKind.IMAGE:
        raise WrongKind(f"asset {asset_id!r} is {asset.kind.value}, not an image")
    return EmbodimentCondition(image_asset=asset_id)


def opening_user_message(condition: EmbodimentCondition, text: str) -> ChatMessage:
    """First user turn; carries the self-image in the visual condition."""
    if condition.visual:
        return ChatMessage.user(text, image_refs=(condition.image_asset,))
    return ChatMessage.user(text)


_QUERY_TOOL_SENTENCE = (
    "You can call the query_identity tool to retrieve more details about "
    "your own body, sensors, and capabilities."
)


def build_system_prompt(bundle: IdentityBundle, include_rules: bool = True) -> str:
    """Deterministic prompt: identity, then rules, then the retrieval hint."""
    if not bundle.identity_text:
        raise ValueError("identity_text must be non-empty")
    sections = [bundle.identity_text.strip()]
    if include_rules and bundle.rules_text.strip():
        sections.append("Operating rules:\n" + bundle.rules_text.strip())
    sections.append(_QUERY_TOOL_SENTENCE)
    return "\n\n".join(sections)


def load_bundle(
    root: str | Path,
    size: int = 512,
    overlap: int = 64,
    embedder: Optional[Embedder] = None,
) -> IdentityBundle:
    """Load a bundle directory and ingest its documents."""
    root = Path(root)
    identity_file = root / "identity.txt"
    if not identity_file.is_file():
        raise FileNotFoundError(f"missing {identity_file}")
    identity_text = identity_file.read_text(encoding="utf-8")
    rules_file = root / "rules.txt"
    rules_text = rules_file.read_text(encoding="utf-8") if rules_file.is_file() else ""

    docs = []
    docs_dir = root / "docs"
    if docs_dir.is_dir():
        for path in sorted(docs_dir.iterdir()):
            if path.suffix.lower() in (".txt", ".md") and path.is_file():
                docs.append(
                    SourceDocument(id=path.stem, title=path.stem, body=path.read_text("utf-8"))
                )
    store = ingest(docs, size=size, overlap=overlap, embedder=embedder) if docs else None

    assets: dict[str, Asset] = {}
    manifest = root / "assets" / "manifest.json"
    if manifest.is_file():
        entries = json.loads(manifest.read_text(encoding="utf-8"))
        for asset_id, entry in entries.items():
            assets[asset_id] = Asset(
                id=asset_id,
                kind=AssetKind(entry["kind"]),
                path=root / "assets" / entry["file"],
            )
    return IdentityBundle(identity_text, rules_text, store, assets)
