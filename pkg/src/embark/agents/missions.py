"""Missions: dispatch from the operator channel, procedural execution.

Mission-state synchronization is rule based on purpose: the executor owns
the mission topics and publishes exactly one terminal record per mission,
so no model is ever responsible for remembering whether it reported.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Optional

from embark.agents.base import Agent
from embark.agents.fsm import FSMDefinition, FSMRun, Transition
from embark.msgbus.bus import MessageBus
from embark.msgbus.errors import BusError
from embark.toolkit.registry import Tool, ToolContext
from embark.toolkit.spec import FieldSpec, FieldType, ToolOutcome, ToolSpec

TOPIC_REQUESTS = "mission/requests"
TOPIC_STATUS = "mission/status"

NAV_ACTION = "nav/goto"
DETECT_SERVICE = "detect"
SERVICE_TIMEOUT_MS = 1000
SUCCESS_TOLERANCE = 0.25

_STOPWORDS = frozenset(
    {"the", "and", "for", "with", "into", "onto", "from", "near", "please", "then", "now"}
)


class MissionStatus(str, Enum):
    PENDING = "pending"
    EXECUTING = "executing"
    SUCCEEDED = "succeeded"
    FAILED = "failed"


def mission_record(mission_id: str, prompt: str, status: MissionStatus, report: str = "") -> dict:
    terminal = status in (MissionStatus.SUCCEEDED, MissionStatus.FAILED)
    if terminal != bool(report):
        raise ValueError("report must be non-empty exactly for terminal records")
    return {"mission_id": mission_id, "prompt": prompt, "status": status.value, "report": report}


def dispatch_mission_tool(hook: Callable[[str], str]) -> Tool:
    """Tool the HRI model calls to hand a tasking prompt to the executor."""

    def body(args: dict[str, Any], ctx: ToolContext, call_id: str) -> ToolOutcome:
        mission_id = hook(args["prompt"])
        return ToolOutcome.ok(call_id, f"mission dispatched, mission_id={mission_id}")

    return Tool(
        ToolSpec(
            "dispatch_mission",
            "Hand a navigation or task request over to the mission executor; "
            "you stay available to the operator while it runs.",
            {"prompt": FieldSpec(FieldType.TEXT, description="the operator's tasking request")},
        ),
        body,
    )


def make_dispatch_hook(bus: MessageBus, prefix: str = "mission") -> Callable[[str], str]:
    """Publishes a PENDING record on mission/requests per dispatched prompt."""
    counter = {"n": 0}

    def hook(prompt: str) -> str:
        counter["n"] += 1
        mission_id = f"{prefix}_{counter['n']}"
        bus.publish(TOPIC_REQUESTS, mission_record(mission_id, prompt, MissionStatus.PENDING))
        return mission_id

    return hook


def prompt_keywords(prompt: str) -> list[str]:
    tokens = re.findall(r"[a-z0-9_]+", prompt.lower())
    return [t for t in tokens if len(t) >= 3 and t not in _STOPWORDS]


@dataclass
class _MissionContext:
    bus: MessageBus
    mission_id: str
    prompt: str
    report: str = ""
    target_label: Optional[str] = None
    target_xy: Optional[tuple[float, float]] = None
    handle: Any = None
    last_distance: Optional[float] = None
    model_claim: Optional[str] = None  # logged for comparison, never trusted
    extras: dict[str, Any] = field(default_factory=dict)


def _detect(ctx: _MissionContext, queries: list[str]) -> list[dict[str, Any]]:
    response = ctx.bus.call_service(DETECT_SERVICE, {"queries": queries}, SERVICE_TIMEOUT_MS)
    return list(response.get("detections", []))


def _plan(ctx: _MissionContext) -> str:
    keywords = prompt_keywords(ctx.prompt)
    if not keywords:
        ctx.report = "no target named in prompt"
        return "not_visible"
    try:
        detections = _detect(ctx, keywords)
    except BusError as exc:
        ctx.report = f"perception failed: {exc}"
        return "not_visible"
    if not detections:
        ctx.report = "object not visible"
        return "not_visible"
    nearest = detections[0]
    ctx.target_label = nearest["label"]
    ctx.target_xy = (nearest["x"], nearest["y"])
    ctx.last_distance = nearest["distance"]
    return "planned"


def _act(ctx: _MissionContext) -> str:
    try:
        handle = ctx.bus.send_goal(NAV_ACTION, {"x": ctx.target_xy[0], "y": ctx.target_xy[1]})
    except BusError as exc:
        ctx.report = f"navigation unavailable: {exc}"
        return "rejected"
    if handle.status.value == "rejected":
        ctx.report = "navigation goal rejected"
        return "rejected"
    ctx.handle = handle
    return "accepted"


def _monitor(ctx: _MissionContext) -> str:
    status = ctx.handle.status.value
    if ctx.handle.last_feedback is not None:
        ctx.last_distance = ctx.handle.last_feedback.get("distance_remaining")
    if status in ("accepted", "executing"):
        return "executing"
    if status == "succeeded":
        return "succeeded"
    ctx.report = f"navigation ended with terminal status {status.upper()}"
    return status  # "aborted" | "canceled"


def _verify(ctx: _MissionContext) -> str:
    try:
        detections = _detect(ctx, [ctx.target_label])
    except BusError as exc:
        ctx.report = f"verification failed: {exc}"
        return "mismatch"
    if not detections:
        ctx.report = "object not visible at verification"
        return "mismatch"
    distance = detections[0]["distance"]
    ctx.last_distance = distance
    if distance <= SUCCESS_TOLERANCE + 1e-9:
        ctx.report = f"reached {ctx.target_label} at distance {distance:.2f}"
        return "verified"
    ctx.report = f"{ctx.target_label} still {distance:.2f} away after navigation"
    return "mismatch"


MISSION_FSM = FSMDefinition(
    states={"PLAN": _plan, "ACT": _act, "MONITOR": _monitor, "VERIFY": _verify},
    transitions=(
        Transition("PLAN", "planned", "ACT"),
        Transition("PLAN", "not_visible", "FAIL"),
        Transition("ACT", "accepted", "MONITOR"),
        Transition("ACT", "rejected", "FAIL"),
        Transition("MONITOR", "executing", "MONITOR"),
        Transition("MONITOR", "succeeded", "VERIFY"),
        Transition("MONITOR", "aborted", "FAIL"),
        Transition("MONITOR", "canceled", "FAIL"),
        Transition("VERIFY", "verified", "DONE"),
        Transition("VERIFY", "mismatch", "FAIL"),
    ),
    initial="PLAN",
    terminal=frozenset({"DONE", "FAIL"}),
)


class ControlAgent(Agent):
    """Consumes mission requests; runs the mission FSM one state per tick."""

    def __init__(self, agent_id: str, bus: MessageBus,
                 on_event: Optional[Callable[[str, dict], None]] = None) -> None:
        super().__init__(agent_id)
        self.bus = bus
        self.on_event = on_event
        self._requests = bus.subscribe(TOPIC_REQUESTS)
        self._queue: list[dict[str, Any]] = []
        self._run: Optional[FSMRun] = None
        self._ctx: Optional[_MissionContext] = None
        self.completed: list[dict[str, Any]] = []

    def _emit(self, kind: str, payload: dict) -> None:
        if self.on_event:
            self.on_event(kind, payload)

    def _iterate(self) -> None:
        for env in self._requests.drain():
            if isinstance(env.payload, dict) and env.payload.get("status") == "pending":
                self._queue.append(env.payload)
        if self._run is None and self._queue:
            self._begin(self._queue.pop(0))
        if self._run is not None:
            self._run.step()
            if self._run.finished:
                self._finish()

    def _begin(self, request: dict[str, Any]) -> None:
        ctx = _MissionContext(self.bus, request["mission_id"], request.get("prompt", ""))
        self._ctx = ctx
        self._run = FSMRun(MISSION_FSM, ctx)
        self.bus.publish(
            TOPIC_STATUS, mission_record(ctx.mission_id, ctx.prompt, MissionStatus.EXECUTING)
        )
        self._emit("mission_started", {"mission_id": ctx.mission_id, "prompt": ctx.prompt})

    def _finish(self) -> None:
        assert self._run is not None and self._ctx is not None
        result = self._run.result
        ctx = self._ctx
        if result.status == "ok" and result.terminal_state == "DONE":
            status, report = MissionStatus.SUCCEEDED, ctx.report
        else:
            status = MissionStatus.FAILED
            report = ctx.report or result.error or "mission failed"
        record = mission_record(ctx.mission_id, ctx.prompt, status, report)
        self.bus.publish(TOPIC_STATUS, record)
        self.completed.append({"record": record, "path": result.path})
        self._emit("mission_finished", {"record": record, "path": result.path})
        self._run = None
        self._ctx = None
