"""World state and the tick step.

Objects are solid: no two occupied volumes (footprint x elevation
interval) may intersect, and stacking must satisfy ``z = below.z +
below.height``. The robot is a point; per tick it turns toward its
nav target (at most TURN_RATE degrees), advances only once aligned, and
stops at first contact with a solid footprint.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

from embark.jsonutil import json_compact
from embark.simworld.geometry import (
    Pose2D,
    aabb_overlap,
    intervals_overlap,
    segment_box_entry,
    wrap_deg,
    wrap_signed_deg,
)

ROBOT_SPEED = 0.5  # units per tick
TURN_RATE = 30.0  # degrees per tick
HASH_DECIMALS = 9


@dataclass
class WorldObject:
    id: str
    label: str
    x: float
    y: float
    hx: float
    hy: float
    height: float
    z: float = 0.0
    heading: float = 0.0
    supported_by: Optional[str] = None  # None = resting on the ground
    fixed: bool = False  # walls and other immovable structure


@dataclass
class Robot:
    pose: Pose2D
    width: float = 1.0
    nav_target: Optional[tuple[float, float]] = None


@dataclass
class World:
    bounds: tuple[float, float, float, float]  # x0, y0, x1, y1
    robot: Robot
    objects: dict[str, WorldObject] = field(default_factory=dict)
    regions: dict[str, tuple[float, float, float, float]] = field(default_factory=dict)
    routes: dict[str, list[tuple[float, float]]] = field(default_factory=dict)
    tick: int = 0
    held: Optional[str] = None  # object in the effector, out of the world
    passable: set[str] = field(default_factory=set)  # solidity waived (drive-over)
    halted: bool = False
    safety_violations: list[dict[str, Any]] = field(default_factory=list)
    signals: list[dict[str, Any]] = field(default_factory=list)
    _id_counter: int = 0

    # -- queries -----------------------------------------------------------

    def placed_objects(self) -> list[WorldObject]:
        """Objects physically present (not in the effector), sorted by id."""
        return [o for oid, o in sorted(self.objects.items()) if oid != self.held]

    def in_bounds(self, x: float, y: float) -> bool:
        x0, y0, x1, y1 = self.bounds
        return x0 <= x <= x1 and y0 <= y <= y1

    def solid_blockers(self, ignore: set[str] = frozenset()) -> list[WorldObject]:
        skip = set(ignore) | self.passable
        if self.held:
            skip.add(self.held)
        return [o for oid, o in sorted(self.objects.items()) if oid not in skip]

    def collides(self, obj_id: str, x: float, y: float, z: float) -> Optional[WorldObject]:
        """First solid object overlapping obj placed at (x, y, z), else None."""
        obj = self.objects[obj_id]
        for other in self.placed_objects():
            if other.id == obj_id:
                continue
            if aabb_overlap(x, y, obj.hx, obj.hy, other.x, other.y, other.hx, other.hy) and \
                    intervals_overlap(z, z + obj.height, other.z, other.z + other.height):
                return other
        return None

    def supported_objects(self, base_id: str) -> list[WorldObject]:
        return [o for o in self.placed_objects() if o.supported_by == base_id]

    def next_id(self, prefix: str) -> str:
        self._id_counter += 1
        return f"{prefix}_{self._id_counter}"

    # -- stepping ------------------------------------------------------------

    def step(self, dt_ticks: int = 1) -> None:
        """Advance time; moves the robot toward its nav target if any."""
        for _ in range(dt_ticks):
            self.tick += 1
            if self.halted or self.robot.nav_target is None:
                continue
            self._advance_robot()

    def _advance_robot(self) -> None:
        pose = self.robot.pose
        tx, ty = self.robot.nav_target
        distance = pose.distance_to(tx, ty)
        if distance == 0.0:
            return
        bearing = math.degrees(math.atan2(ty - pose.y, tx - pose.x))
        delta = wrap_signed_deg(bearing - pose.heading)
        if abs(delta) > TURN_RATE:
            pose.heading = wrap_deg(pose.heading + math.copysign(TURN_RATE, delta))
            return  # turning tick: no advance until aligned
        pose.heading = wrap_deg(bearing)
        advance = min(ROBOT_SPEED, distance)
        rad = math.radians(pose.heading)
        nx = pose.x + advance * math.cos(rad)
        ny = pose.y + advance * math.sin(rad)
        # Stop at first contact with any solid footprint.
        t_hit = 1.0
        for obj in self.solid_blockers():
            t = segment_box_entry(pose.x, pose.y, nx, ny, obj.x, obj.y, obj.hx, obj.hy)
            if t is not None:
                t_hit = min(t_hit, t)
        pose.x += (nx - pose.x) * t_hit
        pose.y += (ny - pose.y) * t_hit

    # -- invariant checks (used by tests) -------------------------------------

    def solidity_violations(self) -> list[tuple[str, str]]:
        objs = self.placed_objects()
        bad = []
        for i, a in enumerate(objs):
            for b in objs[i + 1:]:
                if aabb_overlap(a.x, a.y, a.hx, a.hy, b.x, b.y, b.hx, b.hy) and \
                        intervals_overlap(a.z, a.z + a.height, b.z, b.z + b.height):
                    bad.append((a.id, b.id))
        return bad

    def support_violations(self) -> list[str]:
        bad = []
        for obj in self.placed_objects():
            if obj.supported_by is None:
                continue
            base = self.objects.get(obj.supported_by)
            if base is None or obj.supported_by == self.held:
                bad.append(obj.id)
                continue
            if obj.z != base.z + base.height:
                bad.append(obj.id)
            elif not (abs(obj.x - base.x) < obj.hx + base.hx
                      and abs(obj.y - base.y) < obj.hy + base.hy):
                bad.append(obj.id)
        for obj in self.placed_objects():  # support chains must be acyclic
            trail = []
            cur: Optional[WorldObject] = obj
            while cur is not None and cur.supported_by is not None:
                if cur.id in trail:
                    bad.append(obj.id)
                    break
                trail.append(cur.id)
                cur = self.objects.get(cur.supported_by)
        return sorted(set(bad))


# -- serialization ----------------------------------------------------------------


def world_from_dict(doc: dict[str, Any]) -> World:
    robot_doc = doc.get("robot", {})
    world = World(
        bounds=tuple(doc["bounds"]),
        robot=Robot(
            pose=Pose2D(
                float(robot_doc.get("x", 0.0)),
                float(robot_doc.get("y", 0.0)),
                float(robot_doc.get("heading", 0.0)),
            ),
            width=float(robot_doc.get("width", 1.0)),
        ),
    )
    for i, wall in enumerate(doc.get("walls", [])):
        oid = f"wall_{i}"
        world.objects[oid] = WorldObject(
            id=oid,
            label="wall",
            x=float(wall["x"]),
            y=float(wall["y"]),
            hx=float(wall["hx"]),
            hy=float(wall["hy"]),
            height=float(wall.get("height", 2.0)),
            fixed=True,
        )
    for entry in doc.get("objects", []):
        obj = WorldObject(
            id=entry["id"],
            label=entry["label"],
            x=float(entry["x"]),
            y=float(entry["y"]),
            hx=float(entry["hx"]),
            hy=float(entry["hy"]),
            height=float(entry["height"]),
            z=float(entry.get("z", 0.0)),
            supported_by=entry.get("supported_by"),
            fixed=bool(entry.get("fixed", False)),
        )
        world.objects[obj.id] = obj
    for name, rect in doc.get("regions", {}).items():
        world.regions[name] = tuple(rect)
    for name, points in doc.get("routes", {}).items():
        world.routes[name] = [tuple(p) for p in points]
    return world


def load_world(path: str | Path) -> World:
    return world_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def snapshot(world: World) -> dict[str, Any]:
    """Canonical state document: transcripts, checkers, golden hashes."""
    r = world.robot
    return {
        "tick": world.tick,
        "bounds": list(world.bounds),
        "robot": {
            "x": round(r.pose.x, HASH_DECIMALS),
            "y": round(r.pose.y, HASH_DECIMALS),
            "heading": round(r.pose.heading, HASH_DECIMALS),
            "width": r.width,
            "nav_target": list(r.nav_target) if r.nav_target else None,
        },
        "held": world.held,
        "halted": world.halted,
        "objects": [
            {
                "id": o.id,
                "label": o.label,
                "x": round(o.x, HASH_DECIMALS),
                "y": round(o.y, HASH_DECIMALS),
                "z": round(o.z, HASH_DECIMALS),
                "hx": o.hx,
                "hy": o.hy,
                "height": o.height,
                "supported_by": o.supported_by,
                "fixed": o.fixed,
            }
            for o in (world.objects[oid] for oid in sorted(world.objects))
        ],
        "regions": {name: list(rect) for name, rect in sorted(world.regions.items())},
        "passable": sorted(world.passable),
        "safety_violations": len(world.safety_violations),
        "signals": len(world.signals),
    }


def world_from_snapshot(doc: dict[str, Any]) -> World:
    """Rebuild a World from a snapshot document (enough for checkers)."""
    robot = doc.get("robot", {})
    world = world_from_dict(
        {
            "bounds": doc["bounds"],
            "robot": {"x": robot.get("x", 0.0), "y": robot.get("y", 0.0),
                      "heading": robot.get("heading", 0.0), "width": robot.get("width", 1.0)},
            "objects": doc.get("objects", []),
            "regions": doc.get("regions", {}),
        }
    )
    world.tick = doc.get("tick", 0)
    world.held = doc.get("held")
    world.halted = bool(doc.get("halted", False))
    return world


def world_hash(world: World) -> str:
    return hashlib.sha256(json_compact(snapshot(world)).encode("utf-8")).hexdigest()
