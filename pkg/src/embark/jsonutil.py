"""Canonical JSON rendering shared by tools and transcripts."""

from __future__ import annotations

import json
from typing import Any


def json_compact(doc: Any) -> str:
    """One-line JSON with sorted keys: stable bytes for identical values."""
    return json.dumps(doc, ensure_ascii=False, sort_keys=True, separators=(",", ":"))


def try_parse_json(text: str) -> Any:
    """Parse `text` as JSON when possible, else wrap it as {"text": ...}."""
    try:
        doc = json.loads(text)
    except (json.JSONDecodeError, TypeError):
        return {"text": text}
    if isinstance(doc, (dict, list)):
        return doc
    return {"text": text}
