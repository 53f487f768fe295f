"""Anomaly resolver: a one-shot ReAct conversation per anomaly event.

The tool set is exactly the five declared responses; whatever happens
(step limit, exhausted script, provider failure, or a chatty model that
never picks), exactly one resolution is published per event, with
abort_task as the fail-safe.
"""

from __future__ import annotations

from typing import Any, Callable, Optional

from embark.agents.base import Agent
from embark.agents.react import run_react_loop
from embark.identity.bundle import EmbodimentCondition, IdentityBundle, build_system_prompt, \
    opening_user_message
from embark.llm.providers import CompletionParams, Provider
from embark.msgbus.bus import MessageBus
from embark.simworld.orchard import RESOLUTIONS
from embark.toolkit.registry import Tool, ToolContext, ToolRegistry
from embark.toolkit.spec import ToolOutcome, ToolSpec

TOPIC_EVENTS = "anomaly/events"
TOPIC_RESOLUTIONS = "anomaly/resolutions"

_TOOL_BLURBS = {
    "replan_route": "Plot a detour around the obstacle and continue the route.",
    "drive_forward": "Drive straight over the obstacle without stopping.",
    "flash_signal": "Flash the warning lights at the obstacle.",
    "sound_signal": "Sound the horn at the obstacle.",
    "abort_task": "Stop the route entirely and wait for a human.",
}


def make_resolution_tools(resolve: Callable[[str], bool]) -> ToolRegistry:
    def make_body(name: str):
        def body(args: dict[str, Any], ctx: ToolContext, call_id: str) -> ToolOutcome:
            first = resolve(name)
            note = "" if first else " (a resolution was already chosen; this one is ignored)"
            return ToolOutcome.ok(call_id, f"resolution {name} recorded{note}")

        return body

    return ToolRegistry(
        tuple(Tool(ToolSpec(name, _TOOL_BLURBS[name]), make_body(name)) for name in RESOLUTIONS)
    )


class AnomalyAgent(Agent):
    def __init__(
        self,
        agent_id: str,
        bus: MessageBus,
        provider: Provider,
        bundle: IdentityBundle,
        condition: EmbodimentCondition = EmbodimentCondition(),
        max_steps: int = 8,
        params: CompletionParams = CompletionParams(),
        on_event: Optional[Callable[[str, dict], None]] = None,
    ) -> None:
        super().__init__(agent_id)
        self.bus = bus
        self.provider = provider
        self.bundle = bundle
        self.condition = condition
        self.max_steps = max_steps
        self.params = params
        self.on_event = on_event
        self._events = bus.subscribe(TOPIC_EVENTS)
        self.handled: list[dict[str, Any]] = []

    def _emit(self, kind: str, payload: dict) -> None:
        if self.on_event:
            self.on_event(kind, payload)

    def _iterate(self) -> None:
        for env in self._events.drain():
            if isinstance(env.payload, dict):
                self._handle(env.payload)

    @staticmethod
    def _render_event(event: dict[str, Any]) -> str:
        lines = [
            f"The onboard autonomy halted at tick {event.get('tick', '?')}: "
            "an obstacle entered the safety corridor."
        ]
        detections = (event.get("observation") or {}).get("detections") or []
        if detections:
            lines.append("Front camera report:")
            for d in detections:
                lines.append(
                    f"{d['label']}: distance={d['distance']:.2f} "
                    f"bearing={d['bearing']:.1f} confidence={d['confidence']:.2f}"
                )
        else:
            lines.append("Front camera report: nothing identified.")
        lines.append(
            "Decide the safest useful response. Call exactly one of your tools: "
            "replan_route, drive_forward, flash_signal, sound_signal, or abort_task."
        )
        return "\n".join(lines)

    def _handle(self, event: dict[str, Any]) -> None:
        anomaly_id = event.get("anomaly_id", "unknown")
        chosen: dict[str, Any] = {"resolution": None}

        def resolve(name: str) -> bool:
            if chosen["resolution"] is not None:
                return False
            chosen["resolution"] = name
            self.bus.publish(
                TOPIC_RESOLUTIONS,
                {"anomaly_id": anomaly_id, "resolution": name, "source": self.id},
            )
            return True

        registry = make_resolution_tools(resolve)
        ctx = ToolContext(bus=self.bus, clock=self.bus.clock)
        opening = opening_user_message(self.condition, self._render_event(event))
        result = run_react_loop(
            self.provider,
            registry,
            ctx,
            system_prompt=build_system_prompt(self.bundle),
            user_message=opening,
            max_steps=self.max_steps,
            params=self.params,
            on_event=self.on_event,
        )
        if chosen["resolution"] is None:
            # Fail safe: silence is never an option.
            resolve("abort_task")
            self._emit("fail_safe", {"anomaly_id": anomaly_id, "reason": result.error or "no tool call"})
        self.handled.append(
            {"anomaly_id": anomaly_id, "resolution": chosen["resolution"],
             "turn_status": result.status}
        )
