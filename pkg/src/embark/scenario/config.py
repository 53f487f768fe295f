"""Scenario configuration: one JSON file wiring world, agents, and script.

Relative paths are resolved against the config file's directory, so a
scenario directory is self-contained and relocatable.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

AGENT_TYPES = ("hri", "control", "conversational", "tractor", "anomaly")


class ConfigError(ValueError):
    """Configuration is malformed or references missing files."""


@dataclass
class AgentSpec:
    id: str
    type: str
    inbox: Optional[str] = None
    outbox: Optional[str] = None
    tools: str = "standard"  # "standard" | "manip"
    route: Optional[str] = None
    max_steps: int = 16


@dataclass
class ScenarioConfig:
    name: str
    path: Path
    world_file: Path
    agents: list[AgentSpec]
    identity_dir: Optional[Path] = None
    provider: dict[str, Any] = field(default_factory=dict)
    embodiment: dict[str, Any] = field(default_factory=dict)
    seed: int = 0
    max_ticks: int = 500
    snapshot_every: int = 10
    inputs: list[dict[str, Any]] = field(default_factory=list)
    obstacles: list[dict[str, Any]] = field(default_factory=list)
    stop: dict[str, Any] = field(default_factory=lambda: {"kind": "idle", "grace_ticks": 3})
    checkers: list[dict[str, Any]] = field(default_factory=list)

    def meta(self) -> dict[str, Any]:
        """What the transcript needs to re-run checkers later."""
        return {
            "name": self.name,
            "seed": self.seed,
            "max_ticks": self.max_ticks,
            "world": self.world_file.name,
            "agents": [{"id": a.id, "type": a.type} for a in self.agents],
            "checkers": self.checkers,
        }


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ConfigError(message)


def load_config(path: str | Path) -> ScenarioConfig:
    path = Path(path)
    _require(path.is_file(), f"scenario file not found: {path}")
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"bad scenario JSON: {exc}") from exc
    _require(isinstance(doc, dict), "scenario must be a JSON object")
    base = path.parent

    world_file = base / doc.get("world", "")
    _require(world_file.is_file(), f"world file not found: {world_file}")

    identity_dir = None
    if doc.get("identity"):
        identity_dir = base / doc["identity"]
        _require(identity_dir.is_dir(), f"identity bundle not found: {identity_dir}")

    provider = doc.get("provider", {})
    if "scripted" in provider:
        script = base / provider["scripted"]
        _require(script.is_file(), f"script fixture not found: {script}")
        provider = {"scripted": str(script)}
    elif "http" in provider:
        http = dict(provider["http"])
        http.setdefault("base_url", os.environ.get("RAI_LLM_BASE_URL", ""))
        _require(bool(http["base_url"]), "http provider requires base_url or RAI_LLM_BASE_URL")
        provider = {"http": http}

    agents = []
    seen_ids = set()
    for entry in doc.get("agents", []):
        _require("id" in entry and "type" in entry, "agent entries need id and type")
        _require(entry["type"] in AGENT_TYPES, f"unknown agent type {entry['type']!r}")
        _require(entry["id"] not in seen_ids, f"duplicate agent id {entry['id']!r}")
        seen_ids.add(entry["id"])
        agents.append(
            AgentSpec(
                id=entry["id"],
                type=entry["type"],
                inbox=entry.get("inbox"),
                outbox=entry.get("outbox"),
                tools=entry.get("tools", "standard"),
                route=entry.get("route"),
                max_steps=int(entry.get("max_steps", 16)),
            )
        )
    _require(bool(agents), "scenario needs at least one agent")

    config = ScenarioConfig(
        name=doc.get("name", path.stem),
        path=path,
        world_file=world_file,
        agents=agents,
        identity_dir=identity_dir,
        provider=provider,
        embodiment=doc.get("embodiment", {}),
        seed=int(doc.get("seed", 0)),
        max_ticks=int(doc.get("max_ticks", 500)),
        snapshot_every=max(1, int(doc.get("snapshot_every", 10))),
        inputs=list(doc.get("inputs", [])),
        obstacles=list(doc.get("obstacles", [])),
        stop=doc.get("stop", {"kind": "idle", "grace_ticks": 3}),
        checkers=list(doc.get("checkers", [])),
    )
    _require(config.max_ticks >= 1, "max_ticks must be >= 1")
    for item in config.inputs:
        _require("tick" in item and "topic" in item, "inputs need tick and topic")
    return config
