"""Scenario runner: build everything, drive the tick loop, judge the run.

Tick order is fixed (inputs, world, action executors, agents in roster
order, snapshot, trace), identifiers come from a seeded generator, and in
fake-time mode the clock is virtual, so a config plus fixture replays to
a byte-identical transcript. Live mode runs the same loop against the
wall clock at TICKS_PER_SECOND for console sessions.
"""

from __future__ import annotations

import logging
import random
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional

from embark.agents.anomaly import AnomalyAgent
from embark.agents.base import Agent
from embark.agents.conversational import ConversationalAgent, ConversationalConfig
from embark.agents.missions import ControlAgent, dispatch_mission_tool, make_dispatch_hook
from embark.agents.tractor import TractorAutonomy
from embark.identity.bundle import (
    EmbodimentCondition,
    IdentityBundle,
    attach_self_image,
    build_system_prompt,
    load_bundle,
)
from embark.llm.providers import HttpProvider, Provider, ScriptedProvider
from embark.msgbus.bus import MessageBus
from embark.scenario.checks import evaluate_checkers
from embark.scenario.config import ConfigError, ScenarioConfig, load_config
from embark.scenario.transcript import Transcript
from embark.simworld.nav import NavActionServer
from embark.simworld.manip import make_manip_handler
from embark.simworld.orchard import spawn_obstacle
from embark.simworld.sensing import make_detect_handler, observe
from embark.simworld.tools import add_manip_tools
from embark.simworld.world import World, load_world, snapshot
from embark.timing import FakeClock, WallClock
from embark.toolkit.builtins import standard_registry
from embark.toolkit.registry import ToolContext

logger = logging.getLogger(__name__)

TICKS_PER_SECOND = 10
TICK_MS = 1000 // TICKS_PER_SECOND
SNAPSHOT_TOPIC = "world/snapshot"
ANOMALY_ALIAS_SOURCE = "anomaly/events"
ANOMALY_ALIAS = "world/anomalies"


@dataclass
class RunReport:
    outcome: str  # "pass" | "fail" | "error"
    checker_results: list[dict[str, Any]]
    ticks: int
    transcript_path: Optional[Path] = None
    transcript_text: str = ""
    detail: str = ""

    @property
    def exit_code(self) -> int:
        return {"pass": 0, "fail": 1}.get(self.outcome, 2)


@dataclass
class _StopTracker:
    kind: str
    grace_ticks: int
    trigger_tick: Optional[int] = None
    last_activity: int = 0

    def should_stop(self, tick: int) -> bool:
        if self.kind == "idle":
            return tick - self.last_activity >= self.grace_ticks
        if self.trigger_tick is None:
            return False
        return tick - self.trigger_tick >= self.grace_ticks


class ScenarioRunner:
    def __init__(self, config: ScenarioConfig, live: bool = False) -> None:
        self.config = config
        self.live = live
        self.clock = WallClock() if live else FakeClock()
        rng = random.Random(config.seed)
        self.bus = MessageBus(
            clock=self.clock, id_factory=lambda: f"m{rng.getrandbits(64):016x}"
        )
        self.world: World = load_world(config.world_file)
        for spec in config.obstacles:
            spawn_obstacle(self.world, spec["kind"], float(spec["x"]), float(spec["y"]))
        self.transcript = Transcript()
        self.bundle: Optional[IdentityBundle] = (
            load_bundle(config.identity_dir) if config.identity_dir else None
        )
        self.provider: Optional[Provider] = self._build_provider()
        self._tap = self.bus.tap()
        self._alias_sub = self.bus.subscribe(ANOMALY_ALIAS_SOURCE)
        self.agents: list[Agent] = [self._build_agent(spec) for spec in config.agents]
        self._register_world_endpoints()
        self._stop_requested = threading.Event()
        stop = config.stop
        self._tracker = _StopTracker(
            kind=stop.get("kind", "idle"), grace_ticks=int(stop.get("grace_ticks", 3))
        )

    # -- construction ---------------------------------------------------------

    def _build_provider(self) -> Optional[Provider]:
        provider = self.config.provider
        if "scripted" in provider:
            return ScriptedProvider.from_file(provider["scripted"])
        if "http" in provider:
            http = provider["http"]
            loader = self.bundle.load_asset if self.bundle else None
            return HttpProvider(
                base_url=http.get("base_url"),
                api_key=http.get("api_key"),
                model=http.get("model", "default"),
                asset_loader=loader,
            )
        return None

    def _condition(self) -> EmbodimentCondition:
        emb = self.config.embodiment
        if emb.get("condition") == "visual":
            if self.bundle is None:
                raise ConfigError("visual embodiment requires an identity bundle")
            return attach_self_image(self.bundle, emb.get("image_asset", "self"))
        return EmbodimentCondition()

    def _system_prompt(self, fallback: str) -> str:
        if self.bundle is not None:
            return build_system_prompt(self.bundle)
        return fallback

    def _tool_context(self) -> ToolContext:
        return ToolContext(
            bus=self.bus,
            clock=self.clock,
            observe=lambda: observe(self.world),
            store=self.bundle.store if self.bundle else None,
        )

    def _need_provider(self, spec_id: str) -> Provider:
        if self.provider is None:
            raise ConfigError(f"agent {spec_id!r} needs a provider; none configured")
        return self.provider

    def _build_agent(self, spec) -> Agent:
        hook = self.transcript.agent_hook(spec.id)
        if spec.type == "control":
            return ControlAgent(spec.id, self.bus, on_event=hook)
        if spec.type == "tractor":
            route_name = spec.route or "main"
            route = self.world.routes.get(route_name)
            if not route:
                raise ConfigError(f"world has no route {route_name!r}")
            return TractorAutonomy(spec.id, self.bus, self.world, route, on_event=hook)
        if spec.type == "anomaly":
            return AnomalyAgent(
                spec.id,
                self.bus,
                self._need_provider(spec.id),
                self.bundle if self.bundle else IdentityBundle("You resolve field anomalies."),
                condition=self._condition(),
                max_steps=spec.max_steps,
                on_event=hook,
            )
        if spec.type == "hri":
            registry = standard_registry()
            registry.add(dispatch_mission_tool(make_dispatch_hook(self.bus)))
            config = ConversationalConfig(
                system_prompt=self._system_prompt("You are the operator-facing robot agent."),
                provider=self._need_provider(spec.id),
                registry=registry,
                inbox_topic=spec.inbox or "hri/in",
                outbox_topic=spec.outbox or "hri/out",
                relay_topics=("mission/status",),
                max_steps=spec.max_steps,
            )
            return ConversationalAgent(spec.id, self.bus, config, self._tool_context(), hook)
        if spec.type == "conversational":
            registry = standard_registry()
            if spec.tools == "manip":
                add_manip_tools(registry)
            config = ConversationalConfig(
                system_prompt=self._system_prompt("You control a tabletop manipulator."),
                provider=self._need_provider(spec.id),
                registry=registry,
                inbox_topic=spec.inbox or "task/in",
                outbox_topic=spec.outbox or "task/out",
                max_steps=spec.max_steps,
            )
            return ConversationalAgent(spec.id, self.bus, config, self._tool_context(), hook)
        raise ConfigError(f"unknown agent type {spec.type!r}")

    def _register_world_endpoints(self) -> None:
        self.bus.register_service("detect", make_detect_handler(self.world))
        self.bus.register_service("manip", make_manip_handler(self.world))
        self.bus.register_action_server("nav/goto", NavActionServer(self.world))

    # -- execution --------------------------------------------------------------

    def stop(self) -> None:
        self._stop_requested.set()

    def run(self, transcript_path: Optional[str | Path] = None) -> RunReport:
        config = self.config
        self.transcript.append("runner", "scenario_meta", config.meta())
        self._publish_snapshot()
        pending = sorted(config.inputs, key=lambda i: (int(i["tick"]),))
        wall_next = None

        for tick in range(1, config.max_ticks + 1):
            if self._stop_requested.is_set():
                break
            if self.live:
                now = self.clock.now_ms()
                wall_next = now + TICK_MS if wall_next is None else wall_next + TICK_MS
            self.transcript.tick = tick
            while pending and int(pending[0]["tick"]) <= tick:
                item = pending.pop(0)
                payload = item.get("payload", {"text": item.get("text", "")})
                self.bus.publish(item["topic"], payload)
                self.transcript.append("runner", "input",
                                       {"topic": item["topic"], **_input_echo(payload)})
            self.world.step()
            self.bus.tick()
            for agent in self.agents:
                if agent.state.value == "created":
                    agent.start()
                agent.step()
            if tick % config.snapshot_every == 0:
                self._publish_snapshot()
            self._drain_trace(tick)
            if not self.live:
                self.clock.sleep(TICK_MS)
            else:
                self.clock.sleep(max(0, wall_next - self.clock.now_ms()))
            # Live sessions end with the operator (or max_ticks), not with
            # the batch stop condition.
            if not self.live and self._tracker.should_stop(tick):
                break

        final_tick = self.transcript.tick
        if self.world.tick % config.snapshot_every != 0:
            self._publish_snapshot()
        self._drain_trace(final_tick)

        index = self.transcript.index()
        results = evaluate_checkers(index, config.checkers)
        outcome = "pass" if all(r["passed"] for r in results) else "fail"
        self.transcript.append("runner", "checker_results", results)
        self.transcript.append("runner", "outcome", {"outcome": outcome, "ticks": final_tick})

        report = RunReport(
            outcome=outcome,
            checker_results=results,
            ticks=final_tick,
            transcript_text=self.transcript.to_jsonl(),
        )
        if transcript_path is not None:
            report.transcript_path = self.transcript.write(transcript_path)
        return report

    def _publish_snapshot(self) -> None:
        self.bus.publish(SNAPSHOT_TOPIC, snapshot(self.world))

    def _drain_trace(self, tick: int) -> None:
        for env in self._alias_sub.drain():
            self.bus.publish(ANOMALY_ALIAS, env.payload)
        for env in self._tap.drain():
            frame = {
                "v": env.version,
                "kind": env.kind.value,
                "id": env.id,
                "topic": env.topic,
                "ts": env.ts,
                "payload": env.payload,
            }
            if env.corr is not None:
                frame["corr"] = env.corr
            self.transcript.append("bus", env.kind.value, frame)
            if env.topic not in (SNAPSHOT_TOPIC,):
                self._tracker.last_activity = tick
            if self._tracker.kind == "mission_terminal" and env.topic == "mission/status":
                if isinstance(env.payload, dict) and env.payload.get("status") in (
                    "succeeded",
                    "failed",
                ) and self._tracker.trigger_tick is None:
                    self._tracker.trigger_tick = tick
            if self._tracker.kind == "tractor_terminal" and env.topic == "tractor/status":
                if self._tracker.trigger_tick is None:
                    self._tracker.trigger_tick = tick


def _input_echo(payload: Any) -> dict[str, Any]:
    if isinstance(payload, dict):
        return {"text": payload.get("text", ""), "payload": payload}
    return {"text": str(payload), "payload": payload}


def run_scenario(
    path: str | Path,
    transcript_path: Optional[str | Path] = None,
    live: bool = False,
    seed: Optional[int] = None,
) -> RunReport:
    """Load, run, and judge a scenario; ConfigError maps to exit code 2."""
    config = load_config(path)
    if seed is not None:
        config.seed = seed
    runner = ScenarioRunner(config, live=live)
    return runner.run(transcript_path)
