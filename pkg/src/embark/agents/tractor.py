"""Rule-based tractor autonomy: waypoint following with anomaly handoff.

The autonomy is the vehicle's onboard control system, so (like the nav
action server) it works on the world directly; reasoning agents only ever
see the bus. When a solid object enters the lookahead corridor the
autonomy halts, publishes an anomaly event carrying the camera
observation, and waits for a resolution before moving again.
"""

from __future__ import annotations

from typing import Any, Callable, Optional, Sequence

from embark.agents.base import Agent
from embark.msgbus.bus import MessageBus
from embark.simworld import orchard
from embark.simworld.sensing import observation_to_payload, observe
from embark.simworld.world import World, WorldObject

TOPIC_EVENTS = "anomaly/events"
TOPIC_RESOLUTIONS = "anomaly/resolutions"
TOPIC_TRACTOR_STATUS = "tractor/status"

WAYPOINT_TOLERANCE = 0.25


class TractorAutonomy(Agent):
    def __init__(
        self,
        agent_id: str,
        bus: MessageBus,
        world: World,
        route: Sequence[tuple[float, float]],
        on_event: Optional[Callable[[str, dict], None]] = None,
    ) -> None:
        if not route:
            raise ValueError("route must be non-empty")
        super().__init__(agent_id)
        self.bus = bus
        self.world = world
        self.waypoints: list[tuple[float, float]] = [tuple(p) for p in route]
        self.index = 0
        self.acknowledged: set[str] = set()
        self.terminal_status: Optional[str] = None
        self.on_event = on_event
        self._resolutions = bus.subscribe(TOPIC_RESOLUTIONS)
        self._pending: Optional[tuple[str, WorldObject]] = None  # (anomaly_id, obstacle)
        self._anomaly_counter = 0
        self.anomalies_raised = 0

    def done(self) -> bool:
        return self.terminal_status is not None

    def _emit(self, kind: str, payload: dict) -> None:
        if self.on_event:
            self.on_event(kind, payload)

    # -- loop ---------------------------------------------------------------

    def _iterate(self) -> None:
        if self.world.halted and self.terminal_status is None:
            self._terminate("safety_violation")
            return
        if self._pending is not None:
            self._await_resolution()
            return
        self._drive()

    def _drive(self) -> None:
        obstacle = orchard.corridor_obstacle(self.world, ignore=self.acknowledged)
        if obstacle is not None:
            self._halt_for(obstacle)
            return
        pose = self.world.robot.pose
        target = self.waypoints[self.index]
        if pose.distance_to(*target) <= WAYPOINT_TOLERANCE:
            self.index += 1
            if self.index >= len(self.waypoints):
                self.world.robot.nav_target = None
                self._terminate("route_complete")
                return
            target = self.waypoints[self.index]
        self.world.robot.nav_target = target

    def _halt_for(self, obstacle: WorldObject) -> None:
        self.world.robot.nav_target = None
        self._anomaly_counter += 1
        self.anomalies_raised += 1
        anomaly_id = f"{self.id}_anomaly_{self._anomaly_counter}"
        distance = orchard.obstacle_distance(self.world, obstacle)
        pose = self.world.robot.pose
        event = {
            "anomaly_id": anomaly_id,
            "tick": self.world.tick,
            "obstacle_id": obstacle.id,
            "obstacle_distance": round(distance, 6),
            "pose": {"x": round(pose.x, 6), "y": round(pose.y, 6),
                     "heading": round(pose.heading, 6)},
            "observation": observation_to_payload(observe(self.world)),
        }
        self._pending = (anomaly_id, obstacle)
        self.bus.publish(TOPIC_EVENTS, event)
        self._emit("anomaly_raised", event)

    def _await_resolution(self) -> None:
        assert self._pending is not None
        anomaly_id, obstacle = self._pending
        for env in self._resolutions.drain():
            payload = env.payload if isinstance(env.payload, dict) else {}
            if payload.get("anomaly_id") != anomaly_id:
                continue
            resolution = payload.get("resolution", "")
            self._apply(obstacle, resolution)
            if self._pending is None or self.terminal_status is not None:
                return

    def _apply(self, obstacle: WorldObject, resolution: str) -> None:
        resume = self.waypoints[self.index]
        try:
            effect = orchard.apply_resolution(
                self.world, obstacle, resolution, resume, self.world.tick
            )
        except ValueError:
            self._emit("resolution_ignored", {"resolution": resolution})
            return
        self._emit("resolution_applied", {"resolution": resolution,
                                          "obstacle": obstacle.id,
                                          "resumed": effect.resumed})
        if effect.terminal is not None:
            self._pending = None
            self._terminate(effect.terminal)
            return
        if effect.resumed:
            self.acknowledged.add(obstacle.id)
            if effect.detour:
                self.waypoints[self.index:self.index] = [tuple(p) for p in effect.detour]
            self._pending = None
        # signal-only resolutions keep the tractor halted, awaiting more

    def _terminate(self, status: str) -> None:
        self.terminal_status = status
        self.bus.publish(TOPIC_TRACTOR_STATUS, {"status": status, "tick": self.world.tick})
        self._emit("terminal", {"status": status})
