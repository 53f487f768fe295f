"""The unified trace: everything agents, bus, and world did, in order.

One JSON line per event, strictly ordered by (tick, seq). The transcript
is the single debugging artifact for a run and carries enough to re-run
every checker offline (scenario metadata, all bus traffic including
world snapshots, and per-agent loop events).
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Iterator, Optional

from embark.jsonutil import json_compact


class Transcript:
    def __init__(self) -> None:
        self.events: list[dict[str, Any]] = []
        self._seq = 0
        self.tick = 0

    def append(self, source: str, kind: str, payload: Any) -> None:
        self._seq += 1
        self.events.append(
            {"tick": self.tick, "seq": self._seq, "source": source, "kind": kind,
             "payload": payload}
        )

    def agent_hook(self, agent_id: str):
        def hook(kind: str, payload: dict[str, Any]) -> None:
            self.append(f"agent:{agent_id}", kind, payload)

        return hook

    def to_jsonl(self) -> str:
        return "".join(json_compact(e) + "\n" for e in self.events)

    def write(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_jsonl(), encoding="utf-8")
        return path

    def index(self) -> "TranscriptIndex":
        return TranscriptIndex(self.events)


def read_transcript(path: str | Path) -> "TranscriptIndex":
    events = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                events.append(json.loads(line))
    return TranscriptIndex(events)


class TranscriptIndex:
    """Query helper over transcript events."""

    def __init__(self, events: list[dict[str, Any]]) -> None:
        self.events = events

    def __len__(self) -> int:
        return len(self.events)

    def of_kind(self, source: Optional[str] = None, kind: Optional[str] = None
                ) -> Iterator[dict[str, Any]]:
        for event in self.events:
            if source is not None and event["source"] != source:
                continue
            if kind is not None and event["kind"] != kind:
                continue
            yield event

    def meta(self) -> dict[str, Any]:
        for event in self.of_kind("runner", "scenario_meta"):
            return event["payload"]
        raise ValueError("transcript has no scenario_meta event")

    def bus_pubs(self, topic: str) -> list[dict[str, Any]]:
        """PUB envelopes on a topic as [{tick, payload}] in order."""
        out = []
        for event in self.of_kind("bus", "pub"):
            frame = event["payload"]
            if frame.get("topic") == topic:
                out.append({"tick": event["tick"], "payload": frame.get("payload")})
        return out

    def agent_events(self, agent_id: str, kind: Optional[str] = None) -> list[dict[str, Any]]:
        return list(self.of_kind(f"agent:{agent_id}", kind))

    def inputs(self) -> list[dict[str, Any]]:
        return [e for e in self.of_kind("runner", "input")]

    def snapshots(self) -> list[dict[str, Any]]:
        return self.bus_pubs("world/snapshot")

    def initial_snapshot(self) -> dict[str, Any]:
        snaps = self.snapshots()
        if not snaps:
            raise ValueError("transcript has no world snapshots")
        return snaps[0]["payload"]

    def final_snapshot(self) -> dict[str, Any]:
        return self.snapshots()[-1]["payload"]

    def tool_outcomes(self, status: Optional[str] = None) -> list[dict[str, Any]]:
        out = []
        for event in self.events:
            if event["kind"] == "tool_outcome" and event["source"].startswith("agent:"):
                if status is None or event["payload"].get("status") == status:
                    out.append(event)
        return out
