"""Newline-delimited JSON framing for envelopes.

One frame is one envelope: a single line of UTF-8 JSON terminated by
``\\n``, with field names ``v, kind, id, topic, corr, ts, payload`` and
``corr`` omitted entirely when absent. The same framing is used verbatim
over raw TCP streams and as WebSocket text frames.
"""

from __future__ import annotations

import json
from typing import Any

from embark.msgbus.envelope import REPLY_KINDS, WIRE_VERSION, Envelope, Kind
from embark.msgbus.errors import InvalidTopic, MalformedFrame

_KIND_BY_WIRE = {k.value: k for k in Kind}


def encode_envelope(envelope: Envelope) -> bytes:
    """Serialize to one newline-terminated UTF-8 JSON line."""
    doc: dict[str, Any] = {
        "v": envelope.version,
        "kind": envelope.kind.value,
        "id": envelope.id,
        "topic": envelope.topic,
    }
    if envelope.corr is not None:
        doc["corr"] = envelope.corr
    doc["ts"] = envelope.ts
    doc["payload"] = envelope.payload
    return (json.dumps(doc, ensure_ascii=False, allow_nan=False) + "\n").encode("utf-8")


def decode_envelope(frame: bytes | str) -> Envelope:
    """Parse one frame; raises MalformedFrame on any protocol violation."""
    if isinstance(frame, bytes):
        try:
            text = frame.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedFrame(f"frame is not UTF-8: {exc}") from exc
    else:
        text = frame
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedFrame(f"bad JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise MalformedFrame("frame is not a JSON object")

    if doc.get("v") != WIRE_VERSION:
        raise MalformedFrame(f"unsupported version {doc.get('v')!r}")
    kind = _KIND_BY_WIRE.get(doc.get("kind"))
    if kind is None:
        raise MalformedFrame(f"unknown kind {doc.get('kind')!r}")
    for name in ("id", "topic", "ts", "payload"):
        if name not in doc:
            raise MalformedFrame(f"missing required field {name!r}")
    if not isinstance(doc["id"], str) or not doc["id"]:
        raise MalformedFrame("id must be a non-empty string")
    if not isinstance(doc["topic"], str):
        raise MalformedFrame("topic must be a string")
    if not isinstance(doc["ts"], int) or isinstance(doc["ts"], bool):
        raise MalformedFrame("ts must be an integer")

    corr = doc.get("corr")
    if kind in REPLY_KINDS:
        if not isinstance(corr, str) or not corr:
            raise MalformedFrame(f"{kind.value} frame requires corr")
    elif "corr" in doc:
        raise MalformedFrame(f"{kind.value} frame must not carry corr")

    unknown = set(doc) - {"v", "kind", "id", "topic", "corr", "ts", "payload"}
    if unknown:
        raise MalformedFrame(f"unknown fields {sorted(unknown)}")

    try:
        return Envelope(
            kind=kind,
            id=doc["id"],
            topic=doc["topic"],
            ts=doc["ts"],
            payload=doc["payload"],
            corr=corr if kind in REPLY_KINDS else None,
        )
    except (InvalidTopic, ValueError) as exc:
        raise MalformedFrame(str(exc)) from exc
